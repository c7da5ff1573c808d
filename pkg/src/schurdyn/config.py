"""Central numerical configuration.

Every tolerance and iteration budget used by the library lives here, so a
single record can be inspected or overridden instead of hunting for magic
numbers across modules.
"""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    # Schur decomposition (QR iteration)
    schur_deflation: float = 1e-12     # relative to ||H||_F
    schur_sweep_factor: int = 30       # max sweeps = factor * n**2
    schur_check: float = 1e-10         # default invariant-check tolerance

    # eigenvalue separation / reordering
    gap_rel: float = 1e-8              # relative to max |lambda|
    coupling_zero_rel: float = 1e-12   # permutation fallback, relative to ||A||_F
    branch_ambiguity: float = 2.0      # second-nearest / nearest ratio

    # trajectory sampling
    min_steps: int = 64
    gauge: float = 1e-6                # post-fix intra-band connection bound
    overlap_min: float = 1e-8          # consecutive-point overlap floor

    # series and iterative solves
    series_n_max: int = 4
    series_rel: float = 1e-3           # convergence flag threshold
    picard_max_sweeps: int = 50
    picard_damping: float = 0.5
    picard_rel: float = 1e-12
    riccati_order: int = 2
    riccati_substeps: int = 4

    # engines / diagnostics
    exact_step_bound: float = 0.1      # dt * ||H|| must stay below this
    multiplier_cond_max: float = 1e8
    transition_weight: float = 0.9
    transition_window: float = 0.05    # fraction of s_max
    recon_rel: float = 1e-8

    def with_overrides(self, **kwargs) -> "Tolerances":
        return replace(self, **kwargs)


DEFAULT = Tolerances()
