"""Non-adiabatic correction engine for Hermitian drives.

For a Hermitian Hamiltonian the ordered Schur basis coincides with the
instantaneous eigenbasis, and the amplitude change of every band can be
written as a boundary (inter-band) term plus a running (intra-band)
integral, both built from the inter-band coherence factors. The fixed
point of that integral relation is found by damped Picard iteration.
"""

from __future__ import annotations

import numpy as np

from ..config import DEFAULT, Tolerances
from ..errors import ConvergenceError, ValidationError
from ..quadrature import cumulative_simpson
from ..trajectory import TrajectoryGrid, coherence_series
from .report import EvolutionReport

__all__ = ["hermitian_iterate"]


def _require_hermitian(grid: TrajectoryGrid, tol: float = 1e-12):
    for k in (0, grid.n_points // 2, grid.n_points - 1):
        h = grid.model.matrix(grid.s[k])
        if np.linalg.norm(h - h.conj().T) > tol * max(np.linalg.norm(h), 1.0):
            raise ValidationError("hermitian_iterate requires a Hermitian model")


def hermitian_iterate(
    grid: TrajectoryGrid,
    c0,
    n_max: int | None = None,
    config: Tolerances = DEFAULT,
) -> EvolutionReport:
    """Evolve band amplitudes c_k(s) of a Hermitian drive to a fixed point.

    `c0` holds the initial amplitudes in the instantaneous eigenbasis at
    s = 0. Picard sweeps update all amplitudes simultaneously from the
    boundary and integral terms; oscillating residuals are damped. Raises
    ConvergenceError after ``picard_max_sweeps`` sweeps.
    """
    _require_hermitian(grid)
    n = grid.dim
    c0 = np.asarray(c0, dtype=complex)
    if c0.shape != (n,):
        raise ValidationError(f"expected {n} initial amplitudes")

    series = coherence_series(grid, "hermitian", n_max=n_max, config=config)
    rho = series.total                      # (M, k, j)
    conn = grid.conn_chi                    # (M, l, j)
    m_pts = grid.n_points
    ds = grid.step
    u = np.exp(1j * (grid.omega[:, :, None] - grid.omega[:, None, :]))  # (M, k, j)

    c = np.tile(c0, (m_pts, 1))             # initial guess: frozen amplitudes
    prev_resid = np.inf
    damping = 1.0
    for sweep in range(config.picard_max_sweeps):
        boundary = np.einsum("mkj,mj->mk", rho * u, c) - np.einsum(
            "kj,j->k", rho[0] * u[0], c[0]
        )
        integrand = c * np.einsum("mkj,mjk->mk", rho, conn)
        integral = cumulative_simpson(integrand.T, ds).T
        c_new = c0[None, :] + boundary - 1j * integral
        resid = float(np.max(np.abs(c_new - c)))
        if resid > prev_resid:
            damping = config.picard_damping
        c = c + damping * (c_new - c)
        scale = float(np.max(np.abs(c)))
        if resid <= config.picard_rel * max(scale, 1.0):
            break
        prev_resid = resid
    else:
        raise ConvergenceError(
            f"Picard iteration did not converge in {config.picard_max_sweeps} sweeps",
            residual=resid,
        )

    phases = np.exp(-1j * grid.omega)       # (M, n)
    psi = np.einsum("mk,mik->mi", c * phases, grid.chi)
    return EvolutionReport(
        tier="full",
        s=grid.s.copy(),
        psi=psi,
        amplitudes={"c": c},
        diagnostics={
            "picard_sweeps": sweep + 1,
            "picard_residual": resid,
            "series_converged": bool(series.converged.all()),
            "series_terms_kept": series.n_kept,
        },
    )
