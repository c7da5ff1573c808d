"""Result record shared by every evolution engine."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TIERS = ("exact", "leading", "subleading", "full")


@dataclass
class EvolutionReport:
    """Time series produced by one engine run.

    `psi` holds the state vector per grid point. The amplitude, q-function
    and scale-factor entries are populated by the approximation tiers and
    left empty by the exact integrator. `diagnostics` carries convergence
    flags and warnings accumulated during the run.
    """

    tier: str
    s: np.ndarray
    psi: np.ndarray                       # (M, n)
    amplitudes: dict = field(default_factory=dict)
    q_funcs: dict = field(default_factory=dict)
    s_factors: dict = field(default_factory=dict)
    multipliers: np.ndarray | None = None  # (M, 2, 2) for two-level runs
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.tier not in TIERS:
            raise ValueError(f"unknown tier {self.tier!r}")

    @property
    def n_points(self) -> int:
        return len(self.s)

    def final_state(self) -> np.ndarray:
        return self.psi[-1]
