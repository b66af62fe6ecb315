"""Figure emission for training runs.

A run's snapshot panel stacks the snapshotted reconstruction vectors:
one row per snapshot, and within a row the M reconstruction vectors laid
side by side, so self-organisation is read top to bottom.  The panel is
written both as a plain grayscale PGM raster (data-exact) and as an SVG
figure rendered with matplotlib; objective curves are also rendered to SVG.
"""

from __future__ import annotations

import numpy as np

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .errors import InvalidInputError
from .training import TrainingTrace


def snapshot_panel(snapshots) -> np.ndarray:
    """Stack (M, dim) snapshot arrays into a (num_snapshots, M*dim) panel."""
    if not snapshots:
        raise InvalidInputError("no snapshots to plot")
    return np.stack([np.asarray(s).reshape(-1) for s in snapshots])


def write_pgm(array: np.ndarray, path, vmax: float = 2.0) -> None:
    """8-bit binary PGM; intensities clipped to [0, vmax]."""
    a = np.asarray(array, dtype=np.float64)
    if a.ndim != 2:
        raise InvalidInputError("PGM output needs a 2-D array")
    if vmax <= 0:
        raise InvalidInputError("vmax must be > 0")
    pixels = np.round(np.clip(a, 0.0, vmax) / vmax * 255.0).astype(np.uint8)
    header = f"P5\n{a.shape[1]} {a.shape[0]}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header + pixels.tobytes())


def write_snapshot_svg(panel: np.ndarray, steps, path, vmax: float = 2.0,
                       codebook_size: int = None) -> None:
    """Render the snapshot panel with matplotlib and save as SVG."""
    fig, ax = plt.subplots(figsize=(8, 5))
    ax.imshow(panel, cmap="gray", vmin=0.0, vmax=vmax, aspect="auto",
              interpolation="nearest")
    ax.set_xlabel("reconstruction vectors (codes side by side)")
    ax.set_ylabel("training step")
    steps = list(steps)
    ticks = np.linspace(0, len(steps) - 1, min(len(steps), 8)).astype(int)
    ax.set_yticks(ticks)
    ax.set_yticklabels([steps[i] for i in ticks])
    if codebook_size:
        dim = panel.shape[1] // codebook_size
        for y in range(1, codebook_size):
            ax.axvline(y * dim - 0.5, color="tab:orange", lw=0.4)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def write_objective_svg(reports, path) -> None:
    """Objective terms per training step on a log scale."""
    if not reports:
        raise InvalidInputError("no objective reports to plot")
    steps = np.arange(1, len(reports) + 1)
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(steps, [r.total for r in reports], label="total", lw=1.2)
    ax.plot(steps, [r.d1 for r in reports], label="d1 (weighted)", lw=0.8)
    ax.plot(steps, [r.d2 for r in reports], label="d2 (weighted)", lw=0.8)
    ax.set_xlabel("training step")
    ax.set_ylabel("objective")
    ax.set_yscale("log")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def render_training_figures(trace: TrainingTrace, out_dir, stage: int = 1,
                            vmax: float = 2.0, basename: str = "snapshots") -> list:
    """Emit the PGM + SVG panel for one stage and the objective curve."""
    if not trace.snapshots:
        raise InvalidInputError("trace has no snapshots")
    if not 1 <= stage <= len(trace.snapshots[0]):
        raise InvalidInputError(f"stage {stage} outside the trace")
    panel = snapshot_panel([s[stage - 1] for s in trace.snapshots])
    codes = trace.snapshots[0][stage - 1].shape[0]
    paths = []
    pgm = f"{out_dir}/{basename}_stage{stage}.pgm"
    svg = f"{out_dir}/{basename}_stage{stage}.svg"
    write_pgm(panel, pgm, vmax=vmax)
    write_snapshot_svg(panel, trace.snapshot_steps, svg, vmax=vmax, codebook_size=codes)
    paths += [pgm, svg]
    if trace.reports:
        obj = f"{out_dir}/objective.svg"
        write_objective_svg(trace.reports, obj)
        paths.append(obj)
    return paths
