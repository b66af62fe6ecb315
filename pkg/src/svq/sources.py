"""Synthetic training sources.

Two families of vectors embedded on a circular pixel array:

* HumpPairSource: a superposition of two identical Gaussian humps wrapped
  circularly onto `dim` pixels, with object positions either independent or
  correlated (second position at a bounded circular offset from the first).
  The configuration space is small and enumerated exactly.
* TorusSource: a superposition of two sine waves with fixed amplitudes and
  distinct wavenumbers; the two phases are the intrinsic circular
  coordinates, sampled on a uniform grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .objective import Dataset

CORRELATIONS = ("independent", "correlated")


@dataclass
class HumpPairSource:
    """Two Gaussian humps on a circular array.

    `half_width` is the half-width at half maximum of the hump profile
    g(delta) = exp(-ln2 * (delta / half_width)^2); each component of a
    vector is amplitude * (g(dist to pos1) + g(dist to pos2)) with circular
    distances.  Positions are integer pixels in [1, dim].
    """

    dim: int = 24
    half_width: float = 1.5
    amplitude: float = 1.0
    correlation: str = "independent"
    offset_min: int = 4
    offset_max: int = 8

    def __post_init__(self):
        if self.dim < 2:
            raise InvalidInputError("dim must be >= 2")
        if self.half_width <= 0:
            raise InvalidInputError("half_width must be > 0")
        if self.correlation not in CORRELATIONS:
            raise InvalidInputError(f"correlation must be one of {CORRELATIONS}")
        if not 1 <= self.offset_min <= self.offset_max < self.dim:
            raise InvalidInputError("need 1 <= offset_min <= offset_max < dim")

    def _circular_distance(self, positions) -> np.ndarray:
        k = np.arange(1, self.dim + 1)
        raw = np.abs(k[None, :] - np.asarray(positions)[:, None])
        return np.minimum(raw, self.dim - raw)

    def profile(self, delta) -> np.ndarray:
        """Hump profile g with g(0)=1 and g(half_width)=1/2."""
        d = np.asarray(delta, dtype=np.float64)
        return np.exp(-math.log(2.0) * (d / self.half_width) ** 2)

    def vector(self, pos1: int, pos2: int) -> np.ndarray:
        """Superposed hump pair at 1-based pixel positions."""
        for p in (pos1, pos2):
            if not 1 <= p <= self.dim:
                raise InvalidInputError(f"position {p} outside [1, {self.dim}]")
        dists = self._circular_distance([pos1, pos2])
        return self.amplitude * self.profile(dists).sum(axis=0)

    def positions(self) -> np.ndarray:
        """All (pos1, pos2) configurations, 1-based, in enumeration order."""
        if self.correlation == "independent":
            p1, p2 = np.meshgrid(
                np.arange(1, self.dim + 1), np.arange(1, self.dim + 1), indexing="ij"
            )
            return np.column_stack([p1.ravel(), p2.ravel()])
        pairs = []
        for p1 in range(1, self.dim + 1):
            for off in range(self.offset_min, self.offset_max + 1):
                pairs.append((p1, (p1 - 1 + off) % self.dim + 1))
        return np.asarray(pairs)

    def offsets(self) -> np.ndarray:
        """Circular offset pos2-pos1 (mod dim) per enumerated configuration."""
        pos = self.positions()
        return (pos[:, 1] - pos[:, 0]) % self.dim

    def enumerate_configs(self) -> Dataset:
        """Every configuration once, uniform weights."""
        vectors = np.array([self.vector(p1, p2) for p1, p2 in self.positions()])
        return Dataset(vectors=vectors)

    def describe(self) -> list:
        fields = ["source=hump-pair", f"dim={self.dim}", f"half_width={self.half_width}",
                  f"amplitude={self.amplitude}", f"correlation={self.correlation}"]
        if self.correlation == "correlated":
            fields += [f"offset_min={self.offset_min}", f"offset_max={self.offset_max}"]
        return fields


@dataclass
class TorusSource:
    """Superposition of two sine waves with free phases."""

    dim: int
    amplitudes: tuple = (1.0, 1.0)
    wavenumbers: tuple = (1, 3)

    def __post_init__(self):
        if self.dim < 4:
            raise InvalidInputError("dim must be >= 4")
        k1, k2 = self.wavenumbers
        if k1 == k2 or k1 < 1 or k2 < 1:
            raise InvalidInputError("wavenumbers must be distinct positive integers")
        if len(self.amplitudes) != 2:
            raise InvalidInputError("amplitudes must have exactly 2 entries")

    def vector(self, phase1: float, phase2: float) -> np.ndarray:
        k = np.arange(self.dim)
        a1, a2 = self.amplitudes
        k1, k2 = self.wavenumbers
        return (a1 * np.sin(2 * np.pi * k1 * k / self.dim + phase1)
                + a2 * np.sin(2 * np.pi * k2 * k / self.dim + phase2))

    def grid(self, count: int) -> Dataset:
        """count^2 vectors on the uniform phase lattice, uniform weights."""
        if count < 2:
            raise InvalidInputError("grid count must be >= 2")
        phases = 2 * np.pi * np.arange(count) / count
        vectors = np.array([self.vector(a, b) for a in phases for b in phases])
        return Dataset(vectors=vectors)

    def describe(self) -> list:
        return ["source=torus", f"dim={self.dim}",
                f"amplitudes={self.amplitudes[0]},{self.amplitudes[1]}",
                f"wavenumbers={self.wavenumbers[0]},{self.wavenumbers[1]}"]
