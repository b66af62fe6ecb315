"""Normalized gradient-descent training.

Each step evaluates the exact chain gradient on the full enumerated dataset
and moves every parameter block by -eps * g / g0, where g0 is the block's
normalization factor:

    g_w0 = max_y sqrt(||g_w(y)||^2 / dim_in)     (same form for recon)
    g_b0 = max_y |g_b(y)|

so the largest per-block move has root-mean-square eps per dimension for
weights and reconstruction vectors, and magnitude eps for biases.  A block
whose normalizer underflows (exact stationarity) is left unchanged.  Steps
are not guaranteed to descend individually; schedules shrink eps in phases.

The bias normalizer can instead be taken as max_y |b(y)| via
bias_norm="bias-magnitude"; that variant freezes zero-initialized biases
and is off by default.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidInputError, InvalidModelError
from .gradients import ChainGradient, StageGradient, chain_gradient
from .io import format_number, read_csv, write_csv
from .model import ChainModel, StageModel
from .objective import Dataset, ObjectiveReport, chain_objective

ZERO_NORM_GUARD = 1e-300
BIAS_NORM_MODES = ("gradient", "bias-magnitude")


@dataclass
class TrainingPhase:
    """A block of steps with fixed step sizes and stage weights.

    eps_w, eps_b, eps_x and stage_weights are per-stage lists of length L.
    """

    steps: int
    eps_w: list
    eps_b: list
    eps_x: list
    stage_weights: list

    def __post_init__(self):
        if self.steps < 1:
            raise InvalidInputError("steps must be >= 1")
        lengths = {len(self.eps_w), len(self.eps_b), len(self.eps_x),
                   len(self.stage_weights)}
        if len(lengths) != 1:
            raise InvalidInputError("per-stage lists must all have the same length")
        for eps in (*self.eps_w, *self.eps_b, *self.eps_x):
            if eps < 0:
                raise InvalidInputError("step sizes must be >= 0")

    @classmethod
    def uniform(cls, steps: int, eps: float, num_stages: int, stage_weights=None):
        """One eps for every parameter kind and stage."""
        if stage_weights is None:
            stage_weights = [1.0] * num_stages
        e = [float(eps)] * num_stages
        return cls(steps=steps, eps_w=list(e), eps_b=list(e), eps_x=list(e),
                   stage_weights=[float(s) for s in stage_weights])


@dataclass
class TrainingSchedule:
    phases: list
    seed: int = 0

    def __post_init__(self):
        if not self.phases:
            raise InvalidInputError("schedule needs at least one phase")

    @property
    def total_steps(self) -> int:
        return sum(p.steps for p in self.phases)

    def to_json(self) -> str:
        doc = {
            "seed": self.seed,
            "phases": [
                {
                    "steps": p.steps,
                    "eps_w": list(p.eps_w),
                    "eps_b": list(p.eps_b),
                    "eps_x": list(p.eps_x),
                    "stage_weights": list(p.stage_weights),
                }
                for p in self.phases
            ],
        }
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "TrainingSchedule":
        try:
            doc = json.loads(text)
            phases = [
                TrainingPhase(
                    steps=int(p["steps"]),
                    eps_w=[float(v) for v in p["eps_w"]],
                    eps_b=[float(v) for v in p["eps_b"]],
                    eps_x=[float(v) for v in p["eps_x"]],
                    stage_weights=[float(v) for v in p["stage_weights"]],
                )
                for p in doc["phases"]
            ]
            return cls(phases=phases, seed=int(doc.get("seed", 0)))
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            raise InvalidInputError(f"malformed schedule document: {exc}") from exc


@dataclass
class TrainingTrace:
    """Per-step objective reports plus periodic reconstruction snapshots."""

    reports: list = field(default_factory=list)
    snapshot_steps: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    stride: int = 10


def init_model(stage_specs, seed: int, init_scale: float = 0.1,
               data: Dataset = None) -> ChainModel:
    """Fresh chain from per-stage (dim_in, M, n) specs.

    Weights are uniform in [-init_scale, init_scale], biases zero, and
    reconstruction vectors sit at the stage's input mean plus uniform noise
    of the same scale.  When `data` is given, the input mean of stage 1 is
    the data mean and later stages use the mean posterior propagated through
    the freshly initialized earlier stages; without data the mean is zero.
    """
    rng = np.random.default_rng(seed)
    stages = []
    current = None if data is None else data.vectors
    for dim_in, M, n in stage_specs:
        if current is not None and current.shape[1] != dim_in:
            raise InvalidModelError(
                f"stage spec dim_in {dim_in} does not match input width {current.shape[1]}"
            )
        weights = rng.uniform(-init_scale, init_scale, size=(M, dim_in))
        center = np.zeros(dim_in) if current is None else current.mean(axis=0)
        recon = center + rng.uniform(-init_scale, init_scale, size=(M, dim_in))
        stage = StageModel(dim_in=dim_in, M=M, n=n, weights=weights,
                           biases=np.zeros(M), recon=recon)
        stages.append(stage)
        if current is not None:
            current = stage.posterior_batch(current)
    return ChainModel(stages=stages)


def normalizers(grad: StageGradient, stage: StageModel, bias_norm: str = "gradient"):
    """The three per-stage normalization factors (g_w0, g_b0, g_x0)."""
    if bias_norm not in BIAS_NORM_MODES:
        raise InvalidInputError(f"bias_norm must be one of {BIAS_NORM_MODES}")
    d = stage.dim_in
    g_w0 = float(np.sqrt((grad.g_w ** 2).sum(axis=1) / d).max())
    g_x0 = float(np.sqrt((grad.g_x ** 2).sum(axis=1) / d).max())
    if bias_norm == "gradient":
        g_b0 = float(np.abs(grad.g_b).max())
    else:
        g_b0 = float(np.abs(stage.biases).max())
    return g_w0, g_b0, g_x0


def _apply(param: np.ndarray, grad: np.ndarray, eps: float, norm: float) -> np.ndarray:
    if eps == 0.0 or norm < ZERO_NORM_GUARD:
        return param.copy()
    return param - eps * grad / norm


def update_step(chain: ChainModel, grad: ChainGradient, phase: TrainingPhase,
                bias_norm: str = "gradient") -> ChainModel:
    """One normalized descent step; returns a new chain."""
    if len(phase.stage_weights) != chain.num_stages:
        raise InvalidInputError("phase stage count does not match the chain")
    stages = []
    for l, stage in enumerate(chain.stages):
        g = grad.per_stage[l]
        g_w0, g_b0, g_x0 = normalizers(g, stage, bias_norm=bias_norm)
        stages.append(replace(
            stage,
            weights=_apply(stage.weights, g.g_w, phase.eps_w[l], g_w0),
            biases=_apply(stage.biases, g.g_b, phase.eps_b[l], g_b0),
            recon=_apply(stage.recon, g.g_x, phase.eps_x[l], g_x0),
        ))
    return ChainModel(stages=stages, stage_weights=chain.stage_weights.copy())


def train(chain: ChainModel, source, schedule: TrainingSchedule,
          snapshot_stride: int = 10, bias_norm: str = "gradient",
          step_callback=None):
    """Run the schedule on the full enumerated dataset.

    `source` is a Dataset or anything with enumerate_configs().  Every step
    records the pre-update objective; reconstruction vectors are snapshotted
    at step 1, every `snapshot_stride` steps, and at the final step.  The
    run is deterministic: the only randomness is in model initialization.
    `step_callback(step, before, after, report)` is invoked after each
    update when given.
    """
    data = source.enumerate_configs() if hasattr(source, "enumerate_configs") else source
    if not isinstance(data, Dataset):
        raise InvalidInputError("source must be a Dataset or expose enumerate_configs()")
    if snapshot_stride < 1:
        raise InvalidInputError("snapshot_stride must be >= 1")
    trace = TrainingTrace(stride=snapshot_stride)
    total = schedule.total_steps
    step = 0
    for phase in schedule.phases:
        chain = chain.with_stage_weights(phase.stage_weights)
        for _ in range(phase.steps):
            step += 1
            report = chain_objective(chain, data)
            trace.reports.append(report)
            if step == 1 or step % snapshot_stride == 0 or step == total:
                trace.snapshot_steps.append(step)
                trace.snapshots.append([s.recon.copy() for s in chain.stages])
            grad = chain_gradient(chain, data)
            before = chain
            chain = update_step(chain, grad, phase, bias_norm=bias_norm)
            if step_callback is not None:
                step_callback(step, before, chain, report)
    return chain, trace


def write_trace_csv(trace: TrainingTrace, path) -> None:
    """One row per step: step, per-stage d1/d2/s, total."""
    if not trace.reports:
        raise InvalidInputError("trace has no reports")
    num_stages = len(trace.reports[0].per_stage)
    rows = (r.csv_row(i + 1) for i, r in enumerate(trace.reports))
    write_csv(path, rows, header=ObjectiveReport.csv_header(num_stages))


def write_snapshot_csv(trace: TrainingTrace, stage: int, path) -> None:
    """Snapshotted reconstruction vectors of one 1-based stage."""
    if not trace.snapshots:
        raise InvalidInputError("trace has no snapshots")
    if not 1 <= stage <= len(trace.snapshots[0]):
        raise InvalidInputError(f"stage {stage} outside the trace")
    rows = []
    for step, recs in zip(trace.snapshot_steps, trace.snapshots):
        recon = recs[stage - 1]
        for y in range(recon.shape[0]):
            rows.append([step, y + 1, *recon[y]])
    dim = trace.snapshots[0][stage - 1].shape[1]
    header = ["step", "code"] + [f"c{k}" for k in range(1, dim + 1)]
    write_csv(path, rows, header=header, comments=[f"stage={stage}"])


def read_snapshot_csv(path):
    """Inverse of write_snapshot_csv: (steps, list of (M, dim) arrays)."""
    table, _, _ = read_csv(path, has_header=True)
    steps = np.unique(table[:, 0].astype(np.int64))
    panels = []
    for s in steps:
        block = table[table[:, 0] == s]
        order = np.argsort(block[:, 1])
        panels.append(block[order, 2:])
    return steps, panels
