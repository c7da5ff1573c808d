import numpy as np
import pytest

from schurdyn.config import DEFAULT
from schurdyn.engines import evolve_2x2, evolve_nxn, integrate_exact
from schurdyn.errors import ValidationError
from schurdyn.models import EpModelParams, ep_model, three_level_model
from schurdyn.trajectory import sample_trajectory


@pytest.fixture(scope="module")
def three_level():
    model = three_level_model()
    grid = sample_trajectory(model, 1.0, 4096)
    psi0 = grid.chi[0, :, 0] + grid.eta[0, :, 0] + grid.eta[0, :, 1]
    psi0 /= np.linalg.norm(psi0)
    exact = integrate_exact(model, psi0, 1.0, 4096)
    return model, grid, psi0, exact


class TestTwoLevelConsistency:
    def test_agrees_with_dedicated_engine(self):
        grid = sample_trajectory(ep_model(EpModelParams(c=2.0, timescale=50.0)), 1.0, 1024)
        psi0 = grid.xi[0, :, 0] + 0.5 * grid.chi[0, :, 0]
        psi0 /= np.linalg.norm(psi0)
        for tier in ("leading", "subleading", "full"):
            two = evolve_2x2(grid, psi0, tier)
            gen = evolve_nxn(grid, psi0, tier)
            rel = np.abs(gen.psi - two.psi).max() / np.abs(two.psi).max()
            assert rel < 1e-10, tier


class TestSchurCouplingStructure:
    def test_couplings_vanish_on_and_below_diagonal(self, three_level):
        _, grid, _, _ = three_level
        hs = grid.hamiltonians()
        raw = np.einsum("kia,kij,kjb->kab", np.conj(grid.chi), hs, grid.chi)
        scale = np.linalg.norm(hs[0])
        for i in range(3):
            for j in range(3):
                if i > j:
                    assert np.abs(raw[:, i, j]).max() < 1e-9 * scale
                elif i == j:
                    assert np.abs(raw[:, i, i] - grid.lam[:, i]).max() < 1e-9 * scale


class TestThreeLevelAccuracy:
    def test_full_tier_final_state(self, three_level):
        _, grid, psi0, exact = three_level
        rep = evolve_nxn(grid, psi0, "full")
        rel = np.abs(rep.psi[-1] - exact.psi[-1]) / np.abs(exact.psi[-1])
        assert rel.max() <= 1e-2
        assert not rep.diagnostics["fixed_point_diverged"]

    def test_full_tier_improves_on_subleading(self, three_level):
        _, grid, psi0, exact = three_level
        sub = evolve_nxn(grid, psi0, "subleading")
        full = evolve_nxn(grid, psi0, "full")
        err_sub = np.abs(sub.psi[-1] - exact.psi[-1]).max()
        err_full = np.abs(full.psi[-1] - exact.psi[-1]).max()
        assert err_full < err_sub

    def test_leading_tier_runs_with_flag(self, three_level):
        _, grid, psi0, _ = three_level
        rep = evolve_nxn(grid, psi0, "leading")
        assert rep.diagnostics["initial_condition_violated"]
        assert np.all(np.isfinite(rep.psi.real))


class TestDiagnostics:
    def test_sweep_budget_flags_divergence(self, three_level):
        _, grid, psi0, _ = three_level
        config = DEFAULT.with_overrides(picard_max_sweeps=1)
        rep = evolve_nxn(grid, psi0, "full", config=config)
        # one sweep cannot reach the fixed point; the report still returns
        assert rep.diagnostics["fixed_point_sweeps"] == 1
        assert rep.psi.shape == (grid.n_points, 3)

    def test_full_requires_order_at_least_two(self, three_level):
        _, grid, psi0, _ = three_level
        with pytest.raises(ValidationError):
            evolve_nxn(grid, psi0, "full", order=1)

    def test_rank_deficient_start_rejected(self):
        h = np.zeros((3, 3), dtype=complex)
        h[0, 0] = 2j
        h[1:, 1:] = np.array([[1j, 0.7], [0.0, -1j]])
        from schurdyn.trajectory import HamiltonianModel

        model = HamiltonianModel(dim=3, eval=lambda s: h, timescale=10.0)
        grid = sample_trajectory(model, 1.0, 64)
        with pytest.raises(ValidationError, match="rank"):
            evolve_nxn(grid, np.array([1.0, 0.0, 0.0]), "subleading")
