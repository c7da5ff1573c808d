import numpy as np
import pytest

from schurdyn.errors import RatioUndefinedError, ValidationError
from schurdyn.models import (
    EpModelParams,
    avoided_crossing_model,
    ep_eigenvalues,
    ep_model,
    state_ratio,
    three_level_model,
)
from schurdyn.linalg import schur_decompose
from schurdyn.trajectory import sample_trajectory


class TestEpModel:
    def test_matrix_structure(self):
        model = ep_model(EpModelParams(c=2.0, timescale=50.0))
        h = model.matrix(0.0)
        w = 1.0 - 2j
        assert np.allclose(h, [[w, 2.0], [2.0, -w]])
        assert model.timescale == 50.0

    def test_eigenvalues_at_start(self):
        lam = ep_eigenvalues(EpModelParams(c=2.0, timescale=50.0), 0.0)
        assert abs(lam - (1.600485180440241 - 1.2496210676876531j)) < 1e-12

    def test_coalescence_point_has_zero_eigenvalues(self):
        # park the loop on the degeneracy: w = -i c makes both eigenvalues 0
        params = EpModelParams(c=2.0, timescale=50.0, center_offset=-1j * 2.0 - 1.0)
        model = ep_model(params)
        h = model.matrix(0.0)  # w = 1 + center = -2j
        ev = np.linalg.eigvals(h)
        assert np.abs(ev).max() < 1e-7

    def test_default_loop_keeps_unit_distance_from_coalescence(self):
        params = EpModelParams(c=2.0, timescale=50.0)
        s = np.linspace(0.0, 1.0, 257)
        w = np.exp(2j * np.pi * s) + params.center
        assert np.abs(np.abs(w - (-2j)) - 1.0).max() < 1e-12

    def test_cycles_scale_engine_timescale(self):
        model = ep_model(EpModelParams(c=2.0, timescale=50.0, cycles=2))
        assert model.timescale == 100.0
        # s in [0, 1] spans both loops
        h0 = model.matrix(0.0)
        h_half = model.matrix(0.5)
        assert np.allclose(h0, h_half, atol=1e-12)

    def test_analytic_vs_numeric_eigenvalues_along_path(self):
        params = EpModelParams(c=2.0, timescale=50.0)
        model = ep_model(params)
        for s in (0.0, 0.17, 0.43, 0.78):
            lam = ep_eigenvalues(params, s)
            got = np.sort_complex(schur_decompose(model.matrix(s)).eigenvalues)
            want = np.sort_complex(np.array([lam, -lam]))
            assert np.abs(got - want).max() < 1e-9

    def test_parameter_validation(self):
        with pytest.raises(ValidationError):
            EpModelParams(c=0.0)
        with pytest.raises(ValidationError):
            EpModelParams(timescale=-1.0)
        with pytest.raises(ValidationError):
            EpModelParams(cycles=0)


class TestStateRatio:
    def test_examples(self):
        assert state_ratio(np.array([1.0, 0.0])).z == 0.0
        r = state_ratio(np.array([1.0, 1j]))
        assert r.z == 1j and r.x == 0.0 and r.y == 1.0

    def test_vanishing_first_component(self):
        with pytest.raises(RatioUndefinedError):
            state_ratio(np.array([0.0, 1.0]))

    def test_wrong_shape(self):
        with pytest.raises(ValidationError):
            state_ratio(np.array([1.0, 2.0, 3.0]))


class TestEigenstateExchange:
    def test_one_loop_swaps_the_ratio_curves(self):
        grid = sample_trajectory(ep_model(EpModelParams(c=2.0, timescale=50.0)), 1.0, 4096)
        z1_start = state_ratio(grid.chi[0, :, 0].copy()).z
        z2_start = state_ratio(grid.xi[0, :, 0].copy()).z
        z1_end = state_ratio(grid.chi[-1, :, 0].copy()).z
        z2_end = state_ratio(grid.xi[-1, :, 0].copy()).z
        assert abs(z1_end - z2_start) < 1e-6
        assert abs(z2_end - z1_start) < 1e-6


class TestCompanionModels:
    def test_avoided_crossing_gap(self):
        model = avoided_crossing_model(gap=1.0, sweep=2.0, timescale=50.0)
        gaps = []
        for s in np.linspace(0, 1, 41):
            ev = np.linalg.eigvalsh(model.matrix(s))
            gaps.append(ev[1] - ev[0])
        assert min(gaps) >= 1.0 - 1e-12
        h = model.matrix(0.3)
        assert np.allclose(h, h.conj().T)

    def test_three_level_separation(self):
        model = three_level_model()
        for s in np.linspace(0, 1, 21):
            ev = np.linalg.eigvals(model.matrix(s))
            gaps = [abs(a - b) for i, a in enumerate(ev) for b in ev[i + 1:]]
            assert min(gaps) > 0.3
