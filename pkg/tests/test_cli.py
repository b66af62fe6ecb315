"""CLI surfaces: every subcommand end to end, plus exit codes."""

import json

import numpy as np
import pytest

from svq.cli import main
from svq.io import read_csv
from svq.model import load_model
from svq.training import TrainingPhase, TrainingSchedule


@pytest.fixture
def workspace(tmp_path):
    data = tmp_path / "data.csv"
    code = main(["gen-data", "--source", "hump-independent", "--dim", "8",
                 "--out", str(data)])
    assert code == 0
    return tmp_path, data


def tiny_schedule(path, num_stages=1, steps=3):
    schedule = TrainingSchedule(
        phases=[TrainingPhase.uniform(steps, 0.1, num_stages)], seed=0)
    path.write_text(schedule.to_json())
    return path


class TestGenData:
    def test_hump_csv(self, workspace):
        tmp, data = workspace
        table, _, comments = read_csv(data)
        assert table.shape == (64, 8)
        assert any("correlation=independent" in c for c in comments)

    def test_torus_csv(self, tmp_path):
        out = tmp_path / "torus.csv"
        code = main(["gen-data", "--source", "torus", "--dim", "12",
                     "--wavenumbers", "1,3", "--grid", "4", "--out", str(out)])
        assert code == 0
        table, _, _ = read_csv(out)
        assert table.shape == (16, 12)


class TestTrain:
    def test_schedule_run(self, workspace):
        tmp, data = workspace
        sched = tiny_schedule(tmp / "sched.json")
        out = tmp / "run"
        code = main(["train", "--schedule", str(sched), "--data", str(data),
                     "--stages", "4:2", "--seed", "5", "--out", str(out), "--quiet"])
        assert code == 0
        model = load_model(out / "model.json")
        assert model.stages[0].M == 4 and model.stages[0].n == 2
        assert (out / "trace.csv").exists()
        assert (out / "snapshots_stage1.svg").exists()

    def test_two_stage_schedule_run(self, workspace):
        tmp, data = workspace
        sched = tiny_schedule(tmp / "sched2.json", num_stages=2)
        out = tmp / "run2"
        code = main(["train", "--schedule", str(sched), "--data", str(data),
                     "--stages", "4:2,3:1", "--seed", "5", "--out", str(out),
                     "--quiet"])
        assert code == 0
        model = load_model(out / "model.json")
        assert [s.M for s in model.stages] == [4, 3]
        assert (out / "snapshots_stage2.csv").exists()

    def test_seed_required(self, workspace):
        tmp, data = workspace
        with pytest.raises(SystemExit) as err:
            main(["train", "--preset", "correlated-joint", "--out", str(tmp / "x")])
        assert err.value.code == 1

    def test_unknown_preset_exits_1(self, tmp_path):
        with pytest.raises(SystemExit) as err:
            main(["train", "--preset", "bogus", "--seed", "1",
                  "--out", str(tmp_path)])
        assert err.value.code == 1

    def test_missing_pieces_with_schedule(self, workspace):
        tmp, data = workspace
        sched = tiny_schedule(tmp / "s.json")
        assert main(["train", "--schedule", str(sched), "--seed", "1",
                     "--out", str(tmp / "y")]) == 1


@pytest.fixture
def trained(workspace):
    tmp, data = workspace
    sched = tiny_schedule(tmp / "sched.json")
    out = tmp / "run"
    assert main(["train", "--schedule", str(sched), "--data", str(data),
                 "--stages", "4:2", "--seed", "5", "--out", str(out),
                 "--quiet"]) == 0
    return tmp, data, out / "model.json"


class TestEval:
    def test_csv_row(self, trained, capsys):
        tmp, data, model = trained
        out = tmp / "eval.csv"
        assert main(["eval", "--model", str(model), "--data", str(data),
                     "--out", str(out), "--step", "7"]) == 0
        printed = capsys.readouterr().out.splitlines()
        assert printed[0] == "step,d1_1,d2_1,s_1,total"
        table, header, _ = read_csv(out, has_header=True)
        assert header == ["step", "d1_1", "d2_1", "s_1", "total"]
        assert table[0, 0] == 7
        assert table[0, -1] == pytest.approx(table[0, 1] + table[0, 2])

    def test_dimension_mismatch_exits_1(self, trained, tmp_path):
        tmp, data, model = trained
        bad = tmp_path / "bad.csv"
        bad.write_text("1.0,2.0\n")
        assert main(["eval", "--model", str(model), "--data", str(bad)]) == 1


class TestEncodeDecode:
    def test_round_trip(self, trained):
        tmp, data, model = trained
        idx = tmp / "indices.csv"
        rec = tmp / "recon.csv"
        assert main(["encode", "--model", str(model), "--data", str(data),
                     "--out", str(idx), "--seed", "9", "--samples", "6"]) == 0
        table, _, _ = read_csv(idx)
        assert table.shape == (64, 6)
        assert table.min() >= 1 and table.max() <= 4
        assert main(["decode", "--model", str(model), "--indices", str(idx),
                     "--out", str(rec), "--data", str(data)]) == 0
        recon, _, _ = read_csv(rec)
        assert recon.shape == (64, 8)

    def test_encode_deterministic(self, trained):
        tmp, data, model = trained
        a, b = tmp / "a.csv", tmp / "b.csv"
        for out in (a, b):
            assert main(["encode", "--model", str(model), "--data", str(data),
                         "--out", str(out), "--seed", "13"]) == 0
        assert a.read_text() == b.read_text()

    def test_encode_seed_required(self, trained):
        tmp, data, model = trained
        with pytest.raises(SystemExit) as err:
            main(["encode", "--model", str(model), "--data", str(data),
                  "--out", str(tmp / "i.csv")])
        assert err.value.code == 1

    def test_decode_bad_indices(self, trained):
        tmp, data, model = trained
        bad = tmp / "badidx.csv"
        bad.write_text("1.5,2\n")
        assert main(["decode", "--model", str(model), "--indices", str(bad),
                     "--out", str(tmp / "r.csv")]) == 1


class TestGradCheck:
    def test_pass_exit_0(self, trained):
        tmp, data, model = trained
        assert main(["grad-check", "--model", str(model), "--data", str(data)]) == 0

    def test_fail_exit_2(self, trained, capsys):
        tmp, data, model = trained
        assert main(["grad-check", "--model", str(model), "--data", str(data),
                     "--tolerance", "1e-18"]) == 2
        assert "FAIL" in capsys.readouterr().out


class TestClassify:
    def test_report_written(self, trained):
        tmp, data, model = trained
        out = tmp / "report.json"
        assert main(["classify", "--model", str(model), "--correlation",
                     "independent", "--dim", "8", "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["classification"] in ("factorial-like", "joint-like",
                                         "invariant-like", "mixed")


class TestPlot:
    def test_figures_from_csv(self, trained):
        tmp, data, model = trained
        out = tmp / "figs"
        snapshots = tmp / "run" / "snapshots_stage1.csv"
        trace = tmp / "run" / "trace.csv"
        assert main(["plot", "--snapshots", str(snapshots), "--trace", str(trace),
                     "--out", str(out)]) == 0
        assert (out / "snapshots_stage1_stage1.pgm").exists()
        assert (out / "objective.svg").exists()

    def test_missing_file_exits_1(self, tmp_path):
        assert main(["plot", "--snapshots", str(tmp_path / "nope.csv"),
                     "--out", str(tmp_path)]) == 1
