"""Two-level non-Hermitian evolution engine and its derived observables.

The initial state is split over the non-orthogonal pair {chi_1(0), eta_2(0)}
and the two components are propagated independently: the chi-component in
the orthonormal reference basis, the eta-component in its own (xi_2, eta_2)
basis. Each component is governed by one scalar q-function obeying a
Riccati-type equation, solved at the requested approximation tier, plus an
amplitude scale factor obtained by quadrature. Both components carry the
same leading scale exp(-i Omega_1), which is factored out of all derived
quantities (adiabatic multipliers, band weights) so nothing overflows.
"""

from __future__ import annotations

import numpy as np

from ..config import DEFAULT, Tolerances
from ..errors import NearDegenerateError, ValidationError
from ..quadrature import cumulative_simpson
from ..trajectory import TrajectoryGrid, coherence_series
from .exact import integrate_exact
from .report import EvolutionReport
from .riccati import RiccatiCoefficients, riccati_integrate, riccati_solve

__all__ = ["evolve_2x2", "adiabatic_multipliers", "detect_transition", "band_weights"]


def _two_level_coeffs(grid: TrajectoryGrid):
    T = grid.timescale
    gap = grid.lam[:, 0] - grid.lam[:, 1]
    ca_eff = grid.conn_chi[:, 0, 1] - T * grid.coupling[:, 0, 1]     # drives chi_1 <- chi_2
    ab_eff = grid.conn_pair_21[:, 0] - T * grid.coupling_pair[:, 0]  # drives xi_2 <- eta_2
    rc_a = RiccatiCoefficients(a=grid.conn_chi[:, 1, 0], b=T * gap, c=ca_eff)
    rc_b = RiccatiCoefficients(a=ab_eff, b=T * gap, c=grid.conn_pair_12[:, 0])
    return rc_a, rc_b, ca_eff, gap


def decompose_initial(grid: TrajectoryGrid, psi0: np.ndarray):
    """Coefficients of psi0 on {chi_1(0), eta_2(0)}; tiny components snap to 0."""
    basis = np.column_stack([grid.chi[0, :, 0], grid.eta[0, :, 0]])
    coeffs = np.linalg.solve(basis, psi0)
    floor = 1e-13 * np.linalg.norm(psi0)
    coeffs[np.abs(coeffs) < floor] = 0.0
    return coeffs[0], coeffs[1]


def evolve_2x2(
    grid: TrajectoryGrid,
    psi0,
    tier: str = "subleading",
    order: int | None = None,
    config: Tolerances = DEFAULT,
) -> EvolutionReport:
    """Approximate two-level evolution at the requested tier.

    tier "leading": algebraic q built from the coherence-factor series;
    cheap but violates q(0) = 0 (flagged in diagnostics).
    tier "subleading": first hierarchy term plus the closed-form fast part.
    tier "full": hierarchy truncated at `order` (default 2) plus fast part;
    if the hierarchy is flagged divergent the equation is integrated
    directly instead.
    """
    if grid.dim != 2:
        raise ValidationError("evolve_2x2 requires a two-level grid")
    if tier == "exact":
        raise ValidationError("use integrate_exact for the exact tier")
    psi0 = np.asarray(psi0, dtype=complex)
    a10, b20 = decompose_initial(grid, psi0)
    rc_a, rc_b, ca_eff, gap = _two_level_coeffs(grid)
    T = grid.timescale
    ds = grid.step
    diagnostics: dict = {}

    if tier == "leading":
        rho_a = coherence_series(grid, "a", config=config)
        rho_b = coherence_series(grid, "b", config=config)
        q_a = rho_a.total[:, 0] * rc_a.a / rc_a.c
        q_b = rho_b.total * rc_b.a / rc_b.c
        diagnostics["initial_condition_violated"] = True
        diagnostics["series_converged"] = {
            "a": bool(rho_a.converged.all()),
            "b": bool(rho_b.converged.all()),
        }
    elif tier == "subleading":
        q_a, _, _, diag_a = riccati_solve(rc_a, ds, order=1, config=config)
        q_b, _, _, diag_b = riccati_solve(rc_b, ds, order=1, config=config)
        diagnostics["riccati"] = {"a": diag_a, "b": diag_b}
    elif tier == "full":
        if order is None:
            order = config.riccati_order
        if order < 2:
            raise ValidationError("full tier requires hierarchy order >= 2")
        q_a, _, _, diag_a = riccati_solve(rc_a, ds, order=order, config=config)
        q_b, _, _, diag_b = riccati_solve(rc_b, ds, order=order, config=config)
        if diag_a["hierarchy_truncated"]:
            q_a = riccati_integrate(grid.s, rc_a, config.riccati_substeps)
            diag_a["direct_integration"] = True
        if diag_b["hierarchy_truncated"]:
            q_b = riccati_integrate(grid.s, rc_b, config.riccati_substeps)
            diag_b["direct_integration"] = True
        diagnostics["riccati"] = {"a": diag_a, "b": diag_b}
    else:
        raise ValidationError(f"unknown tier {tier!r}")

    s_a = np.exp(-1j * cumulative_simpson(rc_a.c * q_a, ds))
    s_b = np.exp(-1j * cumulative_simpson(rc_b.c * q_b, ds))

    u21 = grid.u_factor(1, 0)
    a1 = a10 * s_a
    a2 = -a1 * q_a * u21
    b2 = b20 * s_b
    b1 = -b2 * q_b * u21

    scale = np.exp(-1j * grid.omega[:, 0])
    psi = (
        a10 * s_a[:, None] * (grid.chi[:, :, 0] - q_a[:, None] * grid.chi[:, :, 1])
        + b20 * s_b[:, None] * (grid.eta[:, :, 0] - q_b[:, None] * grid.xi[:, :, 0])
    ) * scale[:, None]

    report = EvolutionReport(
        tier=tier,
        s=grid.s.copy(),
        psi=psi,
        amplitudes={"a1": a1, "a2": a2, "b1": b1, "b2": b2,
                    "a1_0": complex(a10), "b2_0": complex(b20)},
        q_funcs={"q_a": q_a, "q_b": q_b},
        s_factors={"S_a": s_a, "S_b": s_b},
        diagnostics=diagnostics,
    )
    report.multipliers = adiabatic_multipliers(report, grid, config=config)
    return report


def adiabatic_multipliers(
    report: EvolutionReport, grid: TrajectoryGrid, config: Tolerances = DEFAULT
) -> np.ndarray:
    """Multiplier matrix d[k, i, j] mapping initial eigenstate amplitudes to
    instantaneous ones, with the exp(-i Omega_1) scale removed.

    Approximation-tier reports use the closed expressions in the run's
    q and S functions. Exact reports solve the defining linear system per
    grid point from a pair of independently propagated initial conditions.
    """
    if grid.dim != 2:
        raise ValidationError("adiabatic multipliers are defined for two-level runs")
    eta21_0 = np.vdot(grid.xi[0, :, 0], grid.chi[0, :, 0])
    if abs(eta21_0) < 1e-12:
        raise NearDegenerateError("chi_1(0) and xi_2(0) are orthogonal; multipliers undefined")

    if report.tier == "exact":
        return _multipliers_exact(grid, config)

    q_a, q_b = report.q_funcs["q_a"], report.q_funcs["q_b"]
    s_a, s_b = report.s_factors["S_a"], report.s_factors["S_b"]
    gap = grid.lam[:, 0] - grid.lam[:, 1]
    gap0 = gap[0]
    c1 = grid.coupling[:, 0, 1]
    c2 = grid.coupling_pair[:, 0]
    c2_0 = c2[0]
    chi2_xi2 = np.einsum("ki,ki->k", np.conj(grid.chi[:, :, 1]), grid.xi[:, :, 0])
    eta2_chi1 = np.einsum("ki,ki->k", np.conj(grid.eta[:, :, 0]), grid.chi[:, :, 0])
    if np.min(np.abs(chi2_xi2)) < 1e-12 or np.min(np.abs(eta2_chi1)) < 1e-12:
        raise NearDegenerateError("coalescing bases: a required overlap vanishes")

    d11 = s_a * (1.0 - q_a * c1 / gap)
    d12 = -s_a * q_a / chi2_xi2
    d21 = d11 / eta21_0 - gap0 * s_b / (c2_0 * eta2_chi1)
    d22 = d12 / eta21_0 + (gap0 * s_b / c2_0) * (q_b + c2 / gap)
    d = np.empty((len(grid.s), 2, 2), dtype=complex)
    d[:, 0, 0], d[:, 0, 1] = d11, d12
    d[:, 1, 0], d[:, 1, 1] = d21, d22
    return d


def _multipliers_exact(grid: TrajectoryGrid, config: Tolerances) -> np.ndarray:
    steps = grid.n_points - 1
    s_max = float(grid.s[-1])
    run1 = integrate_exact(grid.model, grid.chi[0, :, 0], s_max, steps, config)
    run2 = integrate_exact(grid.model, grid.xi[0, :, 0], s_max, steps, config)
    unscale = np.exp(1j * grid.omega[:, 0])
    d = np.empty((grid.n_points, 2, 2), dtype=complex)
    for k in range(grid.n_points):
        basis = np.column_stack([grid.chi[k, :, 0], grid.xi[k, :, 0]])
        cond = np.linalg.cond(basis)
        if cond > config.multiplier_cond_max:
            raise NearDegenerateError(
                f"eigenvector basis condition number {cond:.2e} exceeds "
                f"{config.multiplier_cond_max:.0e} at s={grid.s[k]:.6g}"
            )
        d[k, 0] = np.linalg.solve(basis, run1.psi[k] * unscale[k])
        d[k, 1] = np.linalg.solve(basis, run2.psi[k] * unscale[k])
    return d


def band_weights(report: EvolutionReport, grid: TrajectoryGrid) -> np.ndarray:
    """Normalized weights of the state on the instantaneous {chi_1, xi_2} pair."""
    if grid.dim != 2:
        raise ValidationError("band weights are defined for two-level runs")
    w = np.zeros((report.n_points, 2))
    for k in range(report.n_points):
        psi = report.psi[k]
        nrm = np.linalg.norm(psi)
        if nrm == 0.0:
            w[k] = np.nan
            continue
        basis = np.column_stack([grid.chi[k, :, 0], grid.xi[k, :, 0]])
        coef = np.linalg.solve(basis, psi / nrm)
        mag2 = np.abs(coef) ** 2
        w[k] = mag2 / mag2.sum()
    return w


def detect_transition(
    report: EvolutionReport, grid: TrajectoryGrid, config: Tolerances = DEFAULT
):
    """Locate sudden band changes of a two-level run.

    The state is decomposed on the instantaneous eigenvector pair; a
    transition is recorded at the first grid point where the dominant
    weight moves to the other band, provided the new band's weight exceeds
    ``transition_weight`` within ``transition_window * s_max`` afterwards.
    Returns a list of (s_star, from_band, to_band) with 1-based bands.
    """
    if report.n_points != grid.n_points:
        raise ValidationError("report and grid are sampled on different grids")
    w = band_weights(report, grid)
    s = report.s
    window = max(1, int(round(config.transition_window * len(s))))
    dom = (w[:, 1] > w[:, 0]).astype(int)
    events = []
    current = dom[0]
    for k in range(1, len(s)):
        if dom[k] == current:
            continue
        new_band = dom[k]
        peak = w[k:k + window, new_band].max()
        if peak >= config.transition_weight:
            events.append((float(s[k]), int(current) + 1, int(new_band) + 1))
            current = new_band
        elif np.mean(dom[k:k + window] == new_band) > 0.5:
            current = new_band  # slow migration, not a sudden transition
        # otherwise: transient blip, dominance returns
    return events
