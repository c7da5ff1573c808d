import numpy as np
import pytest

from schurdyn.engines import adiabatic_multipliers, evolve_2x2, integrate_exact
from schurdyn.harness import _q_references
from schurdyn.models import EpModelParams, ep_model
from schurdyn.trajectory import sample_trajectory


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


class LoopRun:
    """One fully propagated loop experiment shared across tests."""

    def __init__(self, cycles, steps, init, tiers, order=2):
        self.params = EpModelParams(c=2.0, timescale=50.0, cycles=cycles)
        self.model = ep_model(self.params)
        self.grid = sample_trajectory(self.model, 1.0, steps)
        g = self.grid
        if init == "decaying":
            self.psi0 = g.xi[0, :, 0] / np.linalg.norm(g.xi[0, :, 0])
        else:
            self.psi0 = g.chi[0, :, 0] / np.linalg.norm(g.chi[0, :, 0])
        self.exact = integrate_exact(self.model, self.psi0, 1.0, steps)
        self.reports = {
            tier: evolve_2x2(g, self.psi0, tier, order=order) for tier in tiers
        }
        self.q_refs = _q_references(g, g.config)
        self.exact_multipliers = adiabatic_multipliers(self.exact, g)

    def fidelity(self, tier):
        u, v = self.reports[tier].psi, self.exact.psi
        num = np.abs(np.einsum("ki,ki->k", np.conj(u), v)) ** 2
        den = (np.einsum("ki,ki->k", np.conj(u), u).real
               * np.einsum("ki,ki->k", np.conj(v), v).real)
        return num / den


@pytest.fixture(scope="session")
def fig2_run():
    """Single-loop run from the decaying eigenstate, all tiers."""
    return LoopRun(cycles=1, steps=4096, init="decaying",
                   tiers=("leading", "subleading", "full"))


@pytest.fixture(scope="session")
def fig3_run():
    """Double-loop run from the amplifying eigenstate."""
    return LoopRun(cycles=2, steps=8192, init="amplifying",
                   tiers=("subleading", "full"))
