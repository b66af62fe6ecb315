"""Distortion objectives.

The training objective for one stage is the upper bound d1 + d2 on the true
mean Euclidean reconstruction distortion of the stochastic encoder:

    d1 = (2/n)     * E_x sum_y Pr(y|x) ||x - recon(y)||^2
    d2 = (2(n-1)/n) * E_x ||x - sum_y Pr(y|x) recon(y)||^2

For a chain the objective is sum_l s_l (d1_l + d2_l), with stage l evaluated
on the posterior vectors propagated from stage l-1.  Expectations over the
data are exact weighted sums over the Dataset; nothing here samples.

`estimate_true_D` Monte Carlo estimates the true distortion
D = 2 E_x E_{y|x} ||x - recon_mean(y)||^2 of the n-sample encoder, which the
bound dominates.  `lbg_baseline` is the deterministic nearest-neighbour /
centroid quantizer that the n=1 case reduces to.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, InvalidModelError
from .io import read_csv, write_csv
from .model import ChainModel, StageModel


@dataclass
class Dataset:
    """Training vectors with per-vector probability weights (default uniform)."""

    vectors: np.ndarray
    weights: np.ndarray = None

    def __post_init__(self):
        X = np.asarray(self.vectors, dtype=np.float64)
        if X.ndim != 2 or X.shape[0] < 1:
            raise InvalidInputError("vectors must be a non-empty (N, d) array")
        self.vectors = X
        if self.weights is None:
            self.weights = np.full(X.shape[0], 1.0 / X.shape[0])
        w = np.asarray(self.weights, dtype=np.float64)
        if w.shape != (X.shape[0],):
            raise InvalidInputError("weights length must match number of vectors")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise InvalidInputError("weights must be non-negative and sum to 1")
        self.weights = w

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return self.vectors.shape[0]

    def mean(self) -> np.ndarray:
        return self.weights @ self.vectors

    def to_csv(self, path, comments=()) -> None:
        write_csv(path, self.vectors, comments=comments)

    @classmethod
    def from_csv(cls, path) -> "Dataset":
        X, _, _ = read_csv(path)
        return cls(vectors=X)


@dataclass
class ObjectiveReport:
    """Weighted objective breakdown: per-stage (d1, d2, s) and the totals."""

    d1: float
    d2: float
    total: float
    per_stage: list = field(default_factory=list)

    @staticmethod
    def csv_header(num_stages: int) -> list:
        cols = ["step"]
        for l in range(1, num_stages + 1):
            cols += [f"d1_{l}", f"d2_{l}", f"s_{l}"]
        return cols + ["total"]

    def csv_row(self, step: int) -> list:
        row = [step]
        for d1, d2, s in self.per_stage:
            row += [d1, d2, s]
        return row + [self.total]


def _check_stage_data(stage: StageModel, data: Dataset):
    if data.dim != stage.dim_in:
        raise InvalidInputError(
            f"dataset dimension {data.dim} != stage dim_in {stage.dim_in}"
        )


def _stage_terms(stage: StageModel, X: np.ndarray, w: np.ndarray):
    """Exact (d1, d2) of one stage on an explicit input matrix."""
    P = stage.posterior_batch(X)
    diff = X[:, None, :] - stage.recon[None, :, :]
    sq = np.einsum("nmd,nmd->nm", diff, diff)
    d1 = (2.0 / stage.n) * float(w @ np.einsum("nm,nm->n", P, sq))
    resid = X - P @ stage.recon
    d2 = (2.0 * (stage.n - 1) / stage.n) * float(w @ np.einsum("nd,nd->n", resid, resid))
    return d1, d2


def d1_stage(stage: StageModel, data: Dataset) -> float:
    """Per-sample bound term, summed exactly over all M code indices."""
    _check_stage_data(stage, data)
    return _stage_terms(stage, data.vectors, data.weights)[0]


def d2_stage(stage: StageModel, data: Dataset) -> float:
    """Mean-reconstruction bound term; identically 0 when n = 1."""
    _check_stage_data(stage, data)
    return _stage_terms(stage, data.vectors, data.weights)[1]


def chain_objective(chain: ChainModel, data: Dataset) -> ObjectiveReport:
    """Weighted chain objective on forward-propagated stage inputs."""
    if data.dim != chain.stages[0].dim_in:
        raise InvalidModelError(
            f"dataset dimension {data.dim} != first stage dim_in {chain.stages[0].dim_in}"
        )
    inputs = chain.stage_inputs(data.vectors)
    per_stage = []
    total = d1_sum = d2_sum = 0.0
    for stage, X, s in zip(chain.stages, inputs, chain.stage_weights):
        d1, d2 = _stage_terms(stage, X, data.weights)
        per_stage.append((d1, d2, float(s)))
        d1_sum += s * d1
        d2_sum += s * d2
        total += s * (d1 + d2)
    return ObjectiveReport(d1=d1_sum, d2=d2_sum, total=total, per_stage=per_stage)


def estimate_true_D(stage: StageModel, data: Dataset, samples_per_x: int,
                    rng: np.random.Generator):
    """Monte Carlo estimate of the true n-sample encoder distortion.

    For every data vector, `samples_per_x` independent n-index code vectors
    are drawn and decoded; returns (mean, standard error) of the weighted
    distortion 2 E||x - reconstruction||^2.
    """
    _check_stage_data(stage, data)
    if samples_per_x < 1:
        raise InvalidInputError("samples_per_x must be >= 1")
    P = stage.posterior_batch(data.vectors)
    vals = np.empty((len(data), samples_per_x))
    for i in range(len(data)):
        idx = rng.choice(stage.M, size=(samples_per_x, stage.n), p=P[i])
        rec = stage.recon[idx].mean(axis=1)
        resid = data.vectors[i] - rec
        vals[i] = 2.0 * np.einsum("sd,sd->s", resid, resid)
    per_draw = data.weights @ vals
    if samples_per_x == 1 or np.ptp(per_draw) == 0.0:
        return float(per_draw[0]), 0.0
    mean = float(per_draw.mean())
    return mean, float(per_draw.std(ddof=1) / np.sqrt(samples_per_x))


def _nearest_sq_dists(X: np.ndarray, codebook: np.ndarray) -> np.ndarray:
    diff = X[:, None, :] - codebook[None, :, :]
    return np.einsum("nmd,nmd->nm", diff, diff)


def lbg_baseline(data: Dataset, M: int, iterations: int, seed: int = 0,
                 init: np.ndarray = None, return_history: bool = False):
    """Deterministic VQ design: nearest-neighbour partition + centroid update.

    Initial codebook: the first M distinct data vectors under a seeded
    shuffle, unless `init` supplies one.  Empty cells are re-seeded at the
    data vector with the largest current error.  Returns (codebook,
    distortion) where distortion is the weighted mean squared Euclidean
    error; with return_history also the per-iteration distortions.
    """
    X, w = data.vectors, data.weights
    distinct = np.unique(X, axis=0)
    if M > distinct.shape[0]:
        raise InvalidInputError(
            f"M={M} exceeds the {distinct.shape[0]} distinct data vectors"
        )
    if iterations < 1:
        raise InvalidInputError("iterations must be >= 1")
    if init is not None:
        codebook = np.array(init, dtype=np.float64)
        if codebook.shape != (M, data.dim):
            raise InvalidInputError(f"init codebook must have shape {(M, data.dim)}")
    else:
        order = np.random.default_rng(seed).permutation(len(data))
        chosen = []
        for i in order:
            if not any(np.array_equal(X[i], c) for c in chosen):
                chosen.append(X[i])
            if len(chosen) == M:
                break
        codebook = np.array(chosen)

    history = []
    distortion = np.inf
    for _ in range(iterations):
        sq = _nearest_sq_dists(X, codebook)
        assign = sq.argmin(axis=1)
        errors = sq[np.arange(len(data)), assign]
        for cell in range(M):
            if not np.any(assign == cell):
                worst = int(errors.argmax())
                codebook[cell] = X[worst]
                sq = _nearest_sq_dists(X, codebook)
                assign = sq.argmin(axis=1)
                errors = sq[np.arange(len(data)), assign]
        for cell in range(M):
            mask = assign == cell
            codebook[cell] = (w[mask] @ X[mask]) / w[mask].sum()
        resid = X - codebook[assign]
        distortion = float(w @ np.einsum("nd,nd->n", resid, resid))
        history.append(distortion)
    if return_history:
        return codebook, distortion, history
    return codebook, distortion
