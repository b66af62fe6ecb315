"""Synthetic source generators: hump pairs and torus embeddings."""

import math

import numpy as np
import pytest

from svq import HumpPairSource, InvalidInputError, TorusSource


def hump_profile(delta, half_width=1.5):
    return math.exp(-math.log(2.0) * (delta / half_width) ** 2)


class TestHumpVector:
    def test_coincident_objects_double_profile(self):
        src = HumpPairSource()
        v = src.vector(7, 7)
        single = np.array([
            hump_profile(min(abs(k - 7), 24 - abs(k - 7))) for k in range(1, 25)
        ])
        np.testing.assert_allclose(v, 2 * single, rtol=1e-14)

    def test_shift_equivariance(self):
        src = HumpPairSource()
        v = src.vector(5, 17)
        shifted = src.vector(6, 18)
        np.testing.assert_array_equal(shifted, np.roll(v, 1))
        # full wrap: positions past dim wrap to the start
        np.testing.assert_array_equal(src.vector(24, 12), np.roll(src.vector(1, 13), -1))

    def test_component_values(self):
        src = HumpPairSource()
        v = src.vector(5, 17)
        far = hump_profile(12.0)
        assert far < 1e-19
        assert v[4] == pytest.approx(1.0 + far, abs=1e-18)
        assert v[5] == pytest.approx(hump_profile(1.0) + hump_profile(11.0), rel=1e-14)
        assert v[5] == pytest.approx(0.7349, abs=1e-4)

    def test_swap_symmetry(self):
        src = HumpPairSource()
        np.testing.assert_array_equal(src.vector(3, 20), src.vector(20, 3))

    def test_range(self):
        src = HumpPairSource(amplitude=1.3)
        for p1, p2 in [(1, 1), (4, 9), (12, 24)]:
            v = src.vector(p1, p2)
            assert v.min() >= 0.0 and v.max() <= 2 * 1.3

    def test_position_validation(self):
        src = HumpPairSource()
        with pytest.raises(InvalidInputError):
            src.vector(0, 5)
        with pytest.raises(InvalidInputError):
            src.vector(3, 25)


class TestEnumerateConfigs:
    def test_independent_cardinality(self):
        data = HumpPairSource(correlation="independent").enumerate_configs()
        assert len(data) == 576
        np.testing.assert_allclose(data.weights, 1 / 576)

    def test_correlated_cardinality_and_separation(self):
        src = HumpPairSource(correlation="correlated")
        data = src.enumerate_configs()
        assert len(data) == 120
        pos = src.positions()
        seps = [min((p2 - p1) % 24, (p1 - p2) % 24) for p1, p2 in pos]
        assert np.mean(seps) == pytest.approx(6.0)
        assert set(seps) == {4, 5, 6, 7, 8}

    def test_correlated_wraparound(self):
        src = HumpPairSource(correlation="correlated")
        pos = src.positions()
        assert set(pos[:, 0]) == set(range(1, 25))
        # pos1=24 with offset 4 wraps to pos2=4
        assert (24, 4) in {tuple(p) for p in pos}

    def test_small_enumeration(self):
        src = HumpPairSource(dim=4, half_width=1.0, correlation="independent",
                             offset_min=1, offset_max=2)
        data = src.enumerate_configs()
        assert len(data) == 16
        assert len({tuple(p) for p in src.positions()}) == 16

    def test_weights_sum(self):
        data = HumpPairSource(correlation="correlated").enumerate_configs()
        assert abs(data.weights.sum() - 1.0) < 1e-12


class TestTorus:
    def test_single_wave_norm_constant(self):
        src = TorusSource(dim=16, amplitudes=(1.0, 0.0), wavenumbers=(1, 3))
        norms = [np.linalg.norm(src.vector(phi, 0.0)) for phi in np.linspace(0, 2 * np.pi, 9)]
        assert np.ptp(norms) < 1e-10

    def test_periodicity(self):
        src = TorusSource(dim=12, amplitudes=(1.0, 0.5), wavenumbers=(2, 5))
        a = src.vector(0.7, 1.1)
        b = src.vector(0.7 + 2 * np.pi, 1.1)
        np.testing.assert_allclose(a, b, atol=1e-12)

    def test_hand_evaluation(self):
        src = TorusSource(dim=16, amplitudes=(1.0, 1.0), wavenumbers=(1, 3))
        v = src.vector(0.0, 0.0)
        for j in range(16):
            expected = math.sin(2 * math.pi * j / 16) + math.sin(6 * math.pi * j / 16)
            assert v[j] == pytest.approx(expected, abs=1e-12)

    def test_grid_cardinality_and_mean(self):
        src = TorusSource(dim=16, amplitudes=(1.0, 1.0), wavenumbers=(1, 3))
        assert len(src.grid(2)) == 4
        data = src.grid(8)
        assert len(data) == 64
        np.testing.assert_allclose(data.weights, 1 / 64)
        np.testing.assert_allclose(data.mean(), 0.0, atol=1e-10)

    def test_validation(self):
        with pytest.raises(InvalidInputError):
            TorusSource(dim=16, wavenumbers=(2, 2))
        with pytest.raises(InvalidInputError):
            TorusSource(dim=3)
        with pytest.raises(InvalidInputError):
            TorusSource(dim=16).grid(1)
