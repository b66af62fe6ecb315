"""Command-line front end.

Subcommands: gen-data, train, eval, encode, decode, grad-check, classify,
plot.  Exit codes: 0 success, 1 invalid input, 2 numerical failure (a
gradient check above tolerance).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .errors import SvqError
from .gradients import finite_difference_check
from .metrics import classify_encoder
from .model import load_model, sample_code, save_model
from .objective import Dataset, ObjectiveReport, chain_objective
from .io import read_csv, write_csv
from .plots import render_training_figures
from .presets import PRESET_NAMES, expand_preset, run_preset
from .sources import HumpPairSource, TorusSource
from .training import (
    TrainingSchedule,
    TrainingTrace,
    init_model,
    read_snapshot_csv,
    train,
    write_snapshot_csv,
    write_trace_csv,
)


class _Parser(argparse.ArgumentParser):
    # invalid arguments are invalid input: exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _hump_options(p):
    p.add_argument("--dim", type=int, default=24)
    p.add_argument("--half-width", type=float, default=1.5)
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--offset-min", type=int, default=4)
    p.add_argument("--offset-max", type=int, default=8)


def _hump_source(args, correlation):
    return HumpPairSource(dim=args.dim, half_width=args.half_width,
                          amplitude=args.amplitude, correlation=correlation,
                          offset_min=args.offset_min, offset_max=args.offset_max)


def _stage_input(model, X, stage):
    if not 1 <= stage <= model.num_stages:
        raise SvqError(f"stage {stage} outside the model's {model.num_stages} stages")
    cur = X
    for s in model.stages[:stage - 1]:
        cur = s.posterior_batch(cur)
    return cur


def cmd_gen_data(args) -> int:
    if args.source == "torus":
        src = TorusSource(dim=args.dim,
                          amplitudes=tuple(float(v) for v in args.amplitudes.split(",")),
                          wavenumbers=tuple(int(v) for v in args.wavenumbers.split(",")))
        data = src.grid(args.grid)
        comments = src.describe() + [f"grid={args.grid}"]
    else:
        correlation = "independent" if args.source == "hump-independent" else "correlated"
        src = _hump_source(args, correlation)
        data = src.enumerate_configs()
        comments = src.describe()
    data.to_csv(args.out, comments=comments)
    print(f"wrote {len(data)} vectors of dimension {data.dim} to {args.out}")
    return 0


def _progress(total):
    every = max(1, total // 10)

    def cb(step, report):
        if step == 1 or step % every == 0 or step == total:
            print(f"step {step}/{total}  objective {report.total:.6g}", file=sys.stderr)

    return cb


def cmd_train(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.preset:
        _, _, schedule = expand_preset(args.preset, args.seed)
        cb = None if args.quiet else _progress(schedule.total_steps)
        result = run_preset(args.preset, seed=args.seed, output_dir=out,
                            snapshot_stride=args.snapshot_stride, progress=cb)
        print(f"classification: {result.report.classification}")
        print(f"artifacts in {out}")
        return 0
    if not (args.schedule and args.data and args.stages):
        raise SvqError("need --preset, or --schedule with --data and --stages")
    schedule = TrainingSchedule.from_json(Path(args.schedule).read_text())
    data = Dataset.from_csv(args.data)
    specs = []
    dim_in = data.dim
    try:
        for part in args.stages.split(","):
            m_str, n_str = part.split(":")
            specs.append((dim_in, int(m_str), int(n_str)))
            dim_in = int(m_str)
    except ValueError as exc:
        raise SvqError(f"--stages must look like M:n[,M:n...]: {exc}") from exc
    chain = init_model(specs, seed=args.seed, init_scale=args.init_scale, data=data)
    prog = _progress(schedule.total_steps)
    cb = None if args.quiet else (lambda step, before, after, report:
                                  prog(step, report))
    final, trace = train(chain, data, schedule,
                         snapshot_stride=args.snapshot_stride, step_callback=cb)
    save_model(final, out / "model.json")
    write_trace_csv(trace, out / "trace.csv")
    for stage in range(1, final.num_stages + 1):
        write_snapshot_csv(trace, stage, out / f"snapshots_stage{stage}.csv")
    render_training_figures(trace, out, stage=1, vmax=args.vmax)
    print(f"artifacts in {out}")
    return 0


def cmd_eval(args) -> int:
    model = load_model(args.model)
    data = Dataset.from_csv(args.data)
    report = chain_objective(model, data)
    header = ObjectiveReport.csv_header(model.num_stages)
    row = report.csv_row(args.step)
    if args.out:
        write_csv(args.out, [row], header=header)
    print(",".join(header))
    print(",".join(str(v) for v in row))
    return 0


def cmd_encode(args) -> int:
    model = load_model(args.model)
    X, _, _ = read_csv(args.data)
    stage = model.stages[args.stage - 1] if 1 <= args.stage <= model.num_stages \
        else None
    if stage is None:
        raise SvqError(f"stage {args.stage} outside the model's {model.num_stages} stages")
    inputs = _stage_input(model, X, args.stage)
    n = args.samples or stage.n
    rng = np.random.default_rng(args.seed)
    rows = [sample_code(stage.posterior(x), n, rng) for x in inputs]
    write_csv(args.out, rows,
              comments=[f"model={args.model}", f"stage={args.stage}",
                        f"samples={n}", f"seed={args.seed}"])
    print(f"wrote {len(rows)} index rows ({n} samples each) to {args.out}")
    return 0


def cmd_decode(args) -> int:
    model = load_model(args.model)
    idx, _, _ = read_csv(args.indices)
    if not np.allclose(idx, np.round(idx)):
        raise SvqError("index file contains non-integer entries")
    idx = idx.astype(np.int64)
    stage = model.stages[args.stage - 1] if 1 <= args.stage <= model.num_stages \
        else None
    if stage is None:
        raise SvqError(f"stage {args.stage} outside the model's {model.num_stages} stages")
    recon = np.array([stage.reconstruct(row) for row in idx])
    write_csv(args.out, recon, comments=[f"model={args.model}", f"stage={args.stage}"])
    print(f"wrote {len(recon)} reconstructions to {args.out}")
    if args.data:
        X, _, _ = read_csv(args.data)
        if X.shape[0] != recon.shape[0]:
            raise SvqError("--data row count does not match the index file")
        target = _stage_input(model, X, args.stage)
        resid = target - recon
        distortion = 2.0 * float(np.mean(np.einsum("nd,nd->n", resid, resid)))
        print(f"round-trip distortion (2x mean squared error): {distortion:.10g}")
    return 0


def cmd_grad_check(args) -> int:
    model = load_model(args.model)
    data = Dataset.from_csv(args.data)
    report = finite_difference_check(model, data, step=args.step,
                                     tolerance=args.tolerance)
    print(report.format_table())
    return 0 if report.passed else 2


def cmd_classify(args) -> int:
    model = load_model(args.model)
    source = _hump_source(args, args.correlation)
    report = classify_encoder(model, source)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2)
            fh.write("\n")
    counts = report.bump_counts
    print(f"classification: {report.classification}")
    print(f"bump counts: {counts}")
    print(f"separation-invariant inputs: {report.sep_invariant_fraction:.1%}")
    return 0


def cmd_plot(args) -> int:
    steps, panels = read_snapshot_csv(args.snapshots)
    trace = TrainingTrace(snapshot_steps=list(steps),
                          snapshots=[[p] for p in panels])
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    paths = render_training_figures(trace, out, stage=1, vmax=args.vmax,
                                    basename=Path(args.snapshots).stem)
    if args.trace:
        from .plots import write_objective_svg

        table, _, _ = read_csv(args.trace, has_header=True)
        num_stages = (table.shape[1] - 2) // 3

        class _Row:
            def __init__(self, row):
                self.total = row[-1]
                self.d1 = sum(row[1 + 3 * l] * row[3 + 3 * l] for l in range(num_stages))
                self.d2 = sum(row[2 + 3 * l] * row[3 + 3 * l] for l in range(num_stages))

        write_objective_svg([_Row(r) for r in table], out / "objective.svg")
        paths.append(str(out / "objective.svg"))
    for p in paths:
        print(f"wrote {p}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="svq", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", parents=[], help="emit a synthetic dataset CSV")
    p.add_argument("--source", required=True,
                   choices=["hump-independent", "hump-correlated", "torus"])
    _hump_options(p)
    p.add_argument("--amplitudes", default="1.0,1.0")
    p.add_argument("--wavenumbers", default="1,3")
    p.add_argument("--grid", type=int, default=8)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("train", help="train a preset or an explicit schedule")
    p.add_argument("--preset", choices=PRESET_NAMES)
    p.add_argument("--schedule", help="schedule JSON file")
    p.add_argument("--data", help="dataset CSV (with --schedule)")
    p.add_argument("--stages", help="M:n[,M:n...] (with --schedule)")
    p.add_argument("--init-scale", type=float, default=0.1)
    p.add_argument("--snapshot-stride", type=int, default=10)
    p.add_argument("--vmax", type=float, default=2.0)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate the chain objective on a dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--step", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("encode", help="sample code indices for input vectors")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--samples", type=int)
    p.add_argument("--stage", type=int, default=1)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="reconstruct vectors from code indices")
    p.add_argument("--model", required=True)
    p.add_argument("--indices", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--stage", type=int, default=1)
    p.add_argument("--data", help="original inputs; prints round-trip distortion")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("grad-check", help="finite-difference gradient verification")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--step", type=float, default=1e-5)
    p.add_argument("--tolerance", type=float, default=1e-4)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_grad_check)

    p = sub.add_parser("classify", help="encoder-type report for a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--correlation", choices=["independent", "correlated"],
                   default="correlated")
    _hump_options(p)
    p.add_argument("--out", help="write the full report as JSON")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("plot", help="render figures from snapshot/trace CSVs")
    p.add_argument("--snapshots", required=True)
    p.add_argument("--trace")
    p.add_argument("--out", required=True)
    p.add_argument("--vmax", type=float, default=2.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_plot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SvqError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
