"""Exception types shared across the package."""


class SvqError(Exception):
    """Base class for all svq errors."""


class InvalidInputError(SvqError, ValueError):
    """An argument (vector, index, file content) violates an operation's contract."""


class InvalidModelError(SvqError, ValueError):
    """A model's structural invariants are broken (shapes, stage links, weights)."""
