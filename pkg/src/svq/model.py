"""Encoder stages and stage chains.

A stage maps an input vector x to a posterior over M code indices,

    Pr(y|x) = Q(y|x) / sum_y' Q(y'|x),   Q(y|x) = 1 / (1 + exp(-w(y).x - b(y))),

samples n indices i.i.d. from that posterior, and reconstructs the input as
the mean of the selected reconstruction vectors.  Stages chain by feeding the
full length-M posterior vector of one stage as the input vector of the next,
so stage l+1 must have dim_in equal to stage l's M.

Code indices are 1-based in the public API and in all file formats; arrays
are indexed 0-based internally.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidInputError, InvalidModelError
from .io import dumps_stable

MODEL_FORMAT_VERSION = 1


def stable_sigmoid(a: np.ndarray) -> np.ndarray:
    """1/(1+exp(-a)) without overflow: exp is only taken of -|a|."""
    a = np.asarray(a, dtype=np.float64)
    z = np.exp(-np.abs(a))
    return np.where(a >= 0, 1.0 / (1.0 + z), z / (1.0 + z))


def _as_matrix(value, rows, cols, name) -> np.ndarray:
    out = np.asarray(value, dtype=np.float64)
    if out.shape != (rows, cols):
        raise InvalidModelError(f"{name} must have shape {(rows, cols)}, got {out.shape}")
    if not np.all(np.isfinite(out)):
        raise InvalidModelError(f"{name} contains non-finite entries")
    return out


@dataclass
class StageModel:
    """One encoder/decoder stage.

    Fields: input dimension `dim_in`, codebook size `M`, sample count `n`,
    sigmoid parameters `weights` (M, dim_in) and `biases` (M,), and
    reconstruction vectors `recon` (M, dim_in).
    """

    dim_in: int
    M: int
    n: int
    weights: np.ndarray
    biases: np.ndarray
    recon: np.ndarray

    def __post_init__(self):
        if self.dim_in < 1 or self.M < 1 or self.n < 1:
            raise InvalidModelError("dim_in, M and n must all be >= 1")
        self.weights = _as_matrix(self.weights, self.M, self.dim_in, "weights")
        self.recon = _as_matrix(self.recon, self.M, self.dim_in, "recon")
        b = np.asarray(self.biases, dtype=np.float64)
        if b.shape != (self.M,):
            raise InvalidModelError(f"biases must have shape {(self.M,)}, got {b.shape}")
        if not np.all(np.isfinite(b)):
            raise InvalidModelError("biases contain non-finite entries")
        self.biases = b

    def _check_vector(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.dim_in,):
            raise InvalidInputError(
                f"input vector has shape {x.shape}, stage expects ({self.dim_in},)"
            )
        return x

    def _check_batch(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.dim_in:
            raise InvalidInputError(
                f"input batch has shape {X.shape}, stage expects (N, {self.dim_in})"
            )
        return X

    def q(self, x, y: int) -> float:
        """Unnormalised probability Q(y|x) for a 1-based code index y."""
        x = self._check_vector(x)
        if not 1 <= y <= self.M:
            raise InvalidInputError(f"code index {y} outside [1, {self.M}]")
        return float(stable_sigmoid(self.weights[y - 1] @ x + self.biases[y - 1]))

    def q_batch(self, X) -> np.ndarray:
        """Q values for a batch: (N, M)."""
        X = self._check_batch(X)
        return stable_sigmoid(X @ self.weights.T + self.biases)

    def posterior(self, x) -> np.ndarray:
        """Posterior probabilities Pr(y|x) over the M code indices."""
        return self.posterior_batch(self._check_vector(x)[None, :])[0]

    def posterior_batch(self, X) -> np.ndarray:
        q = self.q_batch(X)
        # degenerate saturation (all Q underflow) yields NaN rows, not a raise
        with np.errstate(invalid="ignore"):
            return q / q.sum(axis=1, keepdims=True)

    def reconstruct(self, indices) -> np.ndarray:
        """Mean of the reconstruction vectors selected by 1-based indices."""
        idx = np.asarray(indices)
        if idx.ndim != 1 or idx.size < 1:
            raise InvalidInputError("indices must be a non-empty 1-D sequence")
        if not np.issubdtype(idx.dtype, np.integer):
            raise InvalidInputError("indices must be integers")
        if idx.min() < 1 or idx.max() > self.M:
            raise InvalidInputError(f"code index outside [1, {self.M}]")
        return self.recon[idx - 1].mean(axis=0)

    def expected_reconstruction(self, x) -> np.ndarray:
        """Posterior-weighted mean reconstruction sum_y Pr(y|x) recon(y)."""
        return self.posterior(x) @ self.recon


def sample_code(probs, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n 1-based code indices i.i.d. from a posterior vector.

    Deterministic for a given generator state; the package uses numpy's
    default PCG64 generators (np.random.default_rng) throughout.
    """
    p = np.asarray(probs, dtype=np.float64)
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    if p.ndim != 1 or p.size < 1:
        raise InvalidInputError("probs must be a non-empty 1-D vector")
    if p.min() < -1e-12 or abs(p.sum() - 1.0) > 1e-9:
        raise InvalidInputError("probs is not a probability vector")
    p = np.clip(p, 0.0, None)
    return rng.choice(p.size, size=n, p=p / p.sum()).astype(np.int64) + 1


@dataclass
class ChainModel:
    """Ordered encoder stages plus per-stage objective weights.

    Stage l+1 consumes stage l's posterior vector, so its dim_in must equal
    stage l's M.  At least one stage weight must be positive.
    """

    stages: list = field(default_factory=list)
    stage_weights: np.ndarray = None

    def __post_init__(self):
        if not self.stages:
            raise InvalidModelError("chain needs at least one stage")
        if self.stage_weights is None:
            self.stage_weights = np.ones(len(self.stages))
        s = np.asarray(self.stage_weights, dtype=np.float64)
        if s.shape != (len(self.stages),):
            raise InvalidModelError("stage_weights length must equal number of stages")
        self.stage_weights = s
        self.validate()

    def validate(self):
        s = self.stage_weights
        if np.any(s < 0) or not np.any(s > 0):
            raise InvalidModelError("stage weights must be >= 0 with at least one > 0")
        for l in range(len(self.stages) - 1):
            if self.stages[l + 1].dim_in != self.stages[l].M:
                raise InvalidModelError(
                    f"stage {l + 2} dim_in {self.stages[l + 1].dim_in} "
                    f"!= stage {l + 1} codebook size {self.stages[l].M}"
                )

    @property
    def num_stages(self) -> int:
        return len(self.stages)

    def forward(self, x) -> list:
        """Posterior vectors of every stage for a single input vector."""
        return [p[0] for p in self.forward_batch(np.asarray(x, dtype=np.float64)[None, :])]

    def forward_batch(self, X) -> list:
        """Posterior matrices of every stage; entry l feeds stage l+1."""
        self.validate()
        out = []
        cur = X
        for stage in self.stages:
            cur = stage.posterior_batch(cur)
            out.append(cur)
        return out

    def stage_inputs(self, X) -> list:
        """Input matrix seen by each stage: the data, then each posterior."""
        posts = self.forward_batch(X)
        return [np.asarray(X, dtype=np.float64)] + posts[:-1]

    def with_stage_weights(self, weights) -> "ChainModel":
        return ChainModel(stages=list(self.stages), stage_weights=np.asarray(weights, dtype=np.float64))

    def copy(self) -> "ChainModel":
        stages = [
            replace(s, weights=s.weights.copy(), biases=s.biases.copy(), recon=s.recon.copy())
            for s in self.stages
        ]
        return ChainModel(stages=stages, stage_weights=self.stage_weights.copy())


def chain_forward(chain: ChainModel, x) -> list:
    """Module-level alias for ChainModel.forward."""
    return chain.forward(x)


def save_model(chain: ChainModel, path) -> None:
    """Write the versioned JSON model file (17-digit decimals, stable bytes)."""
    doc = {
        "version": MODEL_FORMAT_VERSION,
        "stages": [
            {
                "dim_in": s.dim_in,
                "M": s.M,
                "n": s.n,
                "weights": [list(row) for row in s.weights],
                "biases": list(s.biases),
                "recon": [list(row) for row in s.recon],
            }
            for s in chain.stages
        ],
        "stage_weights": list(chain.stage_weights),
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_stable(doc) + "\n")


def load_model(path) -> ChainModel:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"{path}: not valid JSON") from exc
    if doc.get("version") != MODEL_FORMAT_VERSION:
        raise InvalidInputError(
            f"{path}: unsupported model format version {doc.get('version')!r}"
        )
    try:
        stages = [
            StageModel(
                dim_in=int(s["dim_in"]),
                M=int(s["M"]),
                n=int(s["n"]),
                weights=s["weights"],
                biases=s["biases"],
                recon=s["recon"],
            )
            for s in doc["stages"]
        ]
        return ChainModel(stages=stages, stage_weights=doc["stage_weights"])
    except (KeyError, TypeError) as exc:
        raise InvalidInputError(f"{path}: malformed model document") from exc
