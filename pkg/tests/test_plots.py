"""PGM/SVG emission and panel assembly."""

import numpy as np
import pytest

from svq import InvalidInputError
from svq.plots import snapshot_panel, write_objective_svg, write_pgm, write_snapshot_svg
from svq.objective import ObjectiveReport


class TestPanel:
    def test_single_snapshot_single_row(self):
        panel = snapshot_panel([np.ones((4, 6))])
        assert panel.shape == (1, 24)

    def test_rows_are_snapshots(self):
        snaps = [np.full((2, 3), i, dtype=float) for i in range(5)]
        panel = snapshot_panel(snaps)
        assert panel.shape == (5, 6)
        np.testing.assert_array_equal(panel[3], 3.0)

    def test_empty_rejected(self):
        with pytest.raises(InvalidInputError):
            snapshot_panel([])


class TestPgm:
    def test_header_and_black_image(self, tmp_path):
        path = tmp_path / "img.pgm"
        write_pgm(np.zeros((3, 8)), path, vmax=2.0)
        raw = path.read_bytes()
        assert raw.startswith(b"P5\n8 3\n255\n")
        assert raw[len(b"P5\n8 3\n255\n"):] == bytes(24)

    def test_clipping_and_scale(self, tmp_path):
        path = tmp_path / "img.pgm"
        write_pgm(np.array([[0.0, 1.0, 2.0, 5.0]]), path, vmax=2.0)
        pixels = path.read_bytes().split(b"255\n", 1)[1]
        assert list(pixels) == [0, 128, 255, 255]

    def test_deterministic_bytes(self, tmp_path):
        a, b = tmp_path / "a.pgm", tmp_path / "b.pgm"
        data = np.linspace(0, 2, 12).reshape(3, 4)
        write_pgm(data, a)
        write_pgm(data, b)
        assert a.read_bytes() == b.read_bytes()


class TestSvg:
    def test_snapshot_svg_written(self, tmp_path):
        panel = np.random.default_rng(0).uniform(0, 2, size=(6, 32))
        path = tmp_path / "panel.svg"
        write_snapshot_svg(panel, steps=[1, 10, 20, 30, 40, 50], path=path,
                           codebook_size=4)
        text = path.read_text()
        assert text.lstrip().startswith("<?xml")
        assert "<svg" in text

    def test_objective_svg_written(self, tmp_path):
        reports = [ObjectiveReport(d1=1.0 / (i + 1), d2=0.5, total=1.0 / (i + 1) + 0.5,
                                   per_stage=[(1.0 / (i + 1), 0.5, 1.0)])
                   for i in range(20)]
        path = tmp_path / "objective.svg"
        write_objective_svg(reports, path)
        assert "<svg" in path.read_text()
