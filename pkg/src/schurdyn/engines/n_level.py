"""General n-level non-Hermitian evolution.

The initial state is decomposed over {chi_1(0), eta_2(0), ..., eta_n(0)}.
The chi-component evolves under a coupled system of scalar q-functions (one
per band above the first), solved self-consistently: each sweep freezes the
cross terms at the previous iterate, leaving independent scalar Riccati
equations. Every eta-component evolves in its own (xi_j, eta_j) pair basis
exactly like the two-level engine's second component; couplings between
different pair sectors are beyond this approximation and show up only in
comparisons against the exact integrator.
"""

from __future__ import annotations

import numpy as np

from ..config import DEFAULT, Tolerances
from ..errors import ValidationError
from ..quadrature import cumulative_simpson
from ..trajectory import TrajectoryGrid, coherence_series
from ..orderings import BasisFamily, completeness_rank
from .report import EvolutionReport
from .riccati import RiccatiCoefficients, riccati_integrate, riccati_solve

__all__ = ["evolve_nxn"]


def _initial_decomposition(grid: TrajectoryGrid, psi0: np.ndarray, config: Tolerances):
    n = grid.dim
    basis = np.column_stack([grid.chi[0, :, :1], grid.eta[0]])
    fam0 = BasisFamily(
        eigenvalues=grid.lam[0],
        chi=grid.chi[0],
        xi=grid.xi[0],
        eta=grid.eta[0],
        coupling_c1=grid.coupling[0, 0, 1:],
        coupling_cj=grid.coupling_pair[0],
        schur_a=np.diag(grid.lam[0]).astype(complex),
        unitaries=np.zeros((n - 1, n, n), dtype=complex),
    )
    rank, smin = completeness_rank(fam0)
    if rank < n:
        raise ValidationError(
            f"initial basis family is rank deficient ({rank} < {n}, "
            f"min singular value {smin:.3e}); cannot decompose the state"
        )
    coeffs = np.linalg.solve(basis, psi0)
    floor = 1e-13 * np.linalg.norm(psi0)
    coeffs[np.abs(coeffs) < floor] = 0.0
    return coeffs


def evolve_nxn(
    grid: TrajectoryGrid,
    psi0,
    tier: str = "full",
    order: int | None = None,
    config: Tolerances = DEFAULT,
) -> EvolutionReport:
    """Approximate n-level evolution at the requested tier.

    Tiers mirror the two-level engine; for n = 2 the code path reduces to
    the same formulas. The full tier iterates the coupled q system to a
    fixed point, seeded by the leading tier; divergence is flagged in the
    diagnostics and the last iterate is still reported.
    """
    n = grid.dim
    if n < 2:
        raise ValidationError("need at least two levels")
    if tier == "exact":
        raise ValidationError("use integrate_exact for the exact tier")
    psi0 = np.asarray(psi0, dtype=complex)
    coeffs = _initial_decomposition(grid, psi0, config)
    c1_0, cj_0 = coeffs[0], coeffs[1:]
    T = grid.timescale
    ds = grid.step
    m_pts = grid.n_points
    diagnostics: dict = {}

    gaps = grid.lam[:, 0:1] - grid.lam[:, 1:]               # (M, n-1)
    ceff = grid.conn_chi - T * grid.coupling                # C^a_{jk} on all pairs
    c_1l = ceff[:, 0, 1:]                                   # row: C^a_{1l}, l >= 2
    c_l1 = ceff[:, 1:, 0]                                   # column: C^a_{l1}

    # ---- chi-sector q functions -------------------------------------------
    rho_a = coherence_series(grid, "a", config=config)
    q_lead = rho_a.total * c_l1 / c_1l                      # (M, n-1)
    diagnostics["series_converged_a"] = bool(rho_a.converged.all())

    def scalar_coeffs(j_idx: int, q_prev: np.ndarray):
        """Coefficients of the j-th scalar equation with frozen cross terms."""
        others = [l for l in range(n - 1) if l != j_idx]
        a = c_l1[:, j_idx].copy()
        b = T * gaps[:, j_idx]
        if others:
            cross_a = np.einsum("ml,ml->m", ceff[:, 1 + j_idx, 1:][:, others], q_prev[:, others])
            cross_b = np.einsum("ml,ml->m", c_1l[:, others], q_prev[:, others])
            a = a - cross_a
            b = b + cross_b
        return RiccatiCoefficients(a=a, b=b, c=c_1l[:, j_idx])

    if tier == "leading":
        q = q_lead
        diagnostics["initial_condition_violated"] = True
    elif tier in ("subleading", "full"):
        if tier == "subleading":
            n_order, sweeps_max = 1, 1
        else:
            n_order = config.riccati_order if order is None else order
            if n_order < 2:
                raise ValidationError("full tier requires hierarchy order >= 2")
            sweeps_max = config.picard_max_sweeps
        # Cross terms are fed with the slow parts only: mixing the fast
        # oscillating parts back through numerical derivatives amplifies
        # grid-scale noise and destabilizes the iteration.
        slow_prev = q_lead.copy()
        q = np.zeros_like(slow_prev)
        slow = np.zeros_like(slow_prev)
        best_q = None
        best_resid = np.inf
        stalled = 0
        for sweep in range(sweeps_max):
            for j_idx in range(n - 1):
                rc = scalar_coeffs(j_idx, slow_prev)
                qj, qbar_j, _, diag = riccati_solve(rc, ds, order=n_order, config=config)
                if diag["hierarchy_truncated"]:
                    qj = riccati_integrate(grid.s, rc, config.riccati_substeps)
                    qbar_j = qj
                    diag["direct_integration"] = True
                q[:, j_idx] = qj
                slow[:, j_idx] = qbar_j
            resid = float(np.max(np.abs(slow - slow_prev)))
            if resid < best_resid:
                best_resid = resid
                best_q = q.copy()
                stalled = 0
            else:
                stalled += 1
            if stalled >= 2 or resid <= 1e-12:
                break
            slow_prev, slow = slow.copy(), slow_prev
        q = best_q
        scale = max(1.0, float(np.max(np.abs(q))))
        diagnostics["fixed_point_sweeps"] = sweep + 1
        diagnostics["fixed_point_residual"] = best_resid
        diagnostics["fixed_point_diverged"] = bool(
            tier == "full" and best_resid > 1e-3 * scale
        )
    else:
        raise ValidationError(f"unknown tier {tier!r}")

    s_a = np.exp(-1j * cumulative_simpson(np.einsum("ml,ml->m", c_1l, q), ds))
    u_j1 = np.exp(1j * (grid.omega[:, 1:] - grid.omega[:, 0:1]))  # 1/U_{1j}
    a1 = c1_0 * s_a
    a_upper = -a1[:, None] * q * u_j1

    scale0 = np.exp(-1j * grid.omega[:, 0])
    psi = c1_0 * s_a[:, None] * (
        grid.chi[:, :, 0] - np.einsum("ml,mil->mi", q, grid.chi[:, :, 1:])
    )

    # ---- eta-sector pair engines ------------------------------------------
    q_pairs = np.zeros((m_pts, n - 1), dtype=complex)
    s_pairs = np.ones((m_pts, n - 1), dtype=complex)
    for j_idx in range(n - 1):
        if cj_0[j_idx] == 0.0:
            continue
        rc_b = RiccatiCoefficients(
            a=grid.conn_pair_21[:, j_idx] - T * grid.coupling_pair[:, j_idx],
            b=T * gaps[:, j_idx],
            c=grid.conn_pair_12[:, j_idx],
        )
        if tier == "leading":
            rho_b = coherence_series(grid, "b", pair=j_idx + 2, config=config)
            qb = rho_b.total * rc_b.a / rc_b.c
        else:
            n_order = 1 if tier == "subleading" else (config.riccati_order if order is None else order)
            qb, _, _, diag = riccati_solve(rc_b, ds, order=n_order, config=config)
            if tier == "full" and diag["hierarchy_truncated"]:
                qb = riccati_integrate(grid.s, rc_b, config.riccati_substeps)
        sb = np.exp(-1j * cumulative_simpson(rc_b.c * qb, ds))
        q_pairs[:, j_idx] = qb
        s_pairs[:, j_idx] = sb
        psi = psi + cj_0[j_idx] * sb[:, None] * (
            grid.eta[:, :, j_idx] - qb[:, None] * grid.xi[:, :, j_idx]
        )

    psi = psi * scale0[:, None]
    b_upper = -cj_0[None, :] * s_pairs * q_pairs * u_j1

    return EvolutionReport(
        tier=tier,
        s=grid.s.copy(),
        psi=psi,
        amplitudes={
            "a1": a1,
            "a_j": a_upper,
            "b1_j": b_upper,
            "b2_j": cj_0[None, :] * s_pairs,
            "c0": coeffs,
        },
        q_funcs={"q_a_j": q, "q_b_j": q_pairs},
        s_factors={"S_a": s_a, "S_b_j": s_pairs},
        diagnostics=diagnostics,
    )
