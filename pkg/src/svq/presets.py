"""Named experiment presets and the run orchestrator.

Each preset bundles a hump-pair source, per-stage (dim_in, M, n) model
specs, and a phased schedule:

    independent-factorial         1 stage, M=16, n=20; eps 0.2 x250, 0.1 x250;
                                  independent object positions
    correlated-factorial-1stage   same model; eps 0.2 x500, 0.1 x500;
                                  correlated positions
    correlated-factorial-2stage   2 stages, each M=16, n=20, equal stage
                                  weights; same schedule
    correlated-joint              1 stage, M=16, n=3; eps 0.2 x500, 0.1 x500,
                                  0.05 x1000
    correlated-invariant          2 stages, each M=16, n=3; (eps, s2) =
                                  (0.2,5) x500, (0.1,10) x500, (0.05,20) x500,
                                  (0.05,40) x500

`run_preset` trains the preset and writes the model file, trace and
snapshot CSVs, PGM/SVG figures, and the encoder-type report.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import InvalidInputError
from .metrics import EncoderTypeReport, classify_encoder
from .model import ChainModel, save_model
from .plots import render_training_figures
from .sources import HumpPairSource
from .training import (
    TrainingPhase,
    TrainingSchedule,
    TrainingTrace,
    init_model,
    train,
    write_snapshot_csv,
    write_trace_csv,
)

PRESET_NAMES = (
    "independent-factorial",
    "correlated-factorial-1stage",
    "correlated-factorial-2stage",
    "correlated-joint",
    "correlated-invariant",
)

INIT_SCALE = 0.1


def _phases(spec, num_stages):
    """spec rows are (eps, steps, stage_weights)."""
    return [
        TrainingPhase.uniform(steps, eps, num_stages, stage_weights=weights)
        for eps, steps, weights in spec
    ]


def expand_preset(name: str, seed: int):
    """(source, stage_specs, schedule) for a preset name."""
    if name == "independent-factorial":
        source = HumpPairSource(correlation="independent")
        stage_specs = [(24, 16, 20)]
        spec = [(0.2, 250, [1.0]), (0.1, 250, [1.0])]
    elif name == "correlated-factorial-1stage":
        source = HumpPairSource(correlation="correlated")
        stage_specs = [(24, 16, 20)]
        spec = [(0.2, 500, [1.0]), (0.1, 500, [1.0])]
    elif name == "correlated-factorial-2stage":
        source = HumpPairSource(correlation="correlated")
        stage_specs = [(24, 16, 20), (16, 16, 20)]
        spec = [(0.2, 500, [1.0, 1.0]), (0.1, 500, [1.0, 1.0])]
    elif name == "correlated-joint":
        source = HumpPairSource(correlation="correlated")
        stage_specs = [(24, 16, 3)]
        spec = [(0.2, 500, [1.0]), (0.1, 500, [1.0]), (0.05, 1000, [1.0])]
    elif name == "correlated-invariant":
        source = HumpPairSource(correlation="correlated")
        stage_specs = [(24, 16, 3), (16, 16, 3)]
        spec = [
            (0.2, 500, [1.0, 5.0]),
            (0.1, 500, [1.0, 10.0]),
            (0.05, 500, [1.0, 20.0]),
            (0.05, 500, [1.0, 40.0]),
        ]
    else:
        raise InvalidInputError(f"unknown preset {name!r}; choose from {PRESET_NAMES}")
    schedule = TrainingSchedule(phases=_phases(spec, len(stage_specs)), seed=seed)
    return source, stage_specs, schedule


@dataclass
class RunResult:
    model: ChainModel
    trace: TrainingTrace
    report: EncoderTypeReport
    files: dict


def run_preset(name: str, seed: int, output_dir, snapshot_stride: int = 10,
               progress=None) -> RunResult:
    """Train a preset and write all artifacts into output_dir."""
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    source, stage_specs, schedule = expand_preset(name, seed)
    data = source.enumerate_configs()
    chain = init_model(stage_specs, seed=seed, init_scale=INIT_SCALE, data=data)
    callback = None
    if progress is not None:
        callback = lambda step, before, after, report: progress(step, report)
    final, trace = train(chain, data, schedule, snapshot_stride=snapshot_stride,
                         step_callback=callback)
    report = classify_encoder(final, source)

    files = {"model": str(out / "model.json"), "trace": str(out / "trace.csv"),
             "classification": str(out / "classification.json"),
             "run": str(out / "run.json")}
    save_model(final, files["model"])
    write_trace_csv(trace, files["trace"])
    for stage in range(1, final.num_stages + 1):
        key = f"snapshots_stage{stage}"
        files[key] = str(out / f"{key}.csv")
        write_snapshot_csv(trace, stage, files[key])
    for path in render_training_figures(trace, out, stage=1,
                                        vmax=2.0 * source.amplitude):
        files[Path(path).stem + Path(path).suffix.replace(".", "_")] = path
    with open(files["classification"], "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")
    with open(files["run"], "w", encoding="utf-8") as fh:
        json.dump({"preset": name, "seed": seed, "snapshot_stride": snapshot_stride,
                   "total_steps": schedule.total_steps,
                   "schedule": json.loads(schedule.to_json())}, fh, indent=2)
        fh.write("\n")
    return RunResult(model=final, trace=trace, report=report, files=files)
