"""Solvers for the first-order nonlinear equation -i q' = -A + B q + C q^2.

Two complementary routes:

* `riccati_solve` builds the slow hierarchy q_1 = A/B, q_{j+1} = A_j/B_j
  (with A_j = -i q_j' - C q_j^2 and B_j = B_{j-1} + 2 C q_j) and adds the
  closed-form rapidly-decaying part that restores the initial condition.
  Each hierarchy term scales like one more inverse power of the drive
  timescale, so truncation converges for slow driving.
* `riccati_integrate` integrates the equation directly with fixed-step RK4
  on interpolated coefficients; it has no slowness assumption and is used
  by the highest approximation tier.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from ..config import DEFAULT, Tolerances
from ..errors import NearDegenerateError, ValidationError
from ..quadrature import cumulative_simpson, derivative

__all__ = ["RiccatiCoefficients", "riccati_solve", "riccati_integrate"]


@dataclass(frozen=True)
class RiccatiCoefficients:
    """Sampled coefficient functions of -i q' = -A + B q + C q^2."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    q0: complex = 0.0

    def __post_init__(self):
        for name in ("a", "b", "c"):
            z = getattr(self, name)
            if not (np.all(np.isfinite(z.real)) and np.all(np.isfinite(z.imag))):
                raise ValidationError(f"coefficient {name} has non-finite entries")


def riccati_solve(
    rc: RiccatiCoefficients,
    ds: float,
    order: int = DEFAULT.riccati_order,
    config: Tolerances = DEFAULT,
):
    """Hierarchy solution q = qbar + qtilde on the sampling grid.

    Returns (q, qbar, qtilde, diagnostics). qbar is the sum of the first
    `order` hierarchy terms (fewer if they start growing, which is flagged);
    qtilde is the closed-form fast part with qtilde(0) = q0 - qbar(0).
    Derivatives use central differences, integrals cumulative Simpson.
    """
    if order < 1:
        raise ValidationError("hierarchy order must be >= 1")
    a, b, c = rc.a, rc.b, rc.c
    if np.min(np.abs(b)) < config.gap_rel * max(np.max(np.abs(b)), 1e-300):
        raise NearDegenerateError("Riccati linear coefficient B vanishes on the grid")

    qj = a / b
    qbar = qj.copy()
    bj = b + 2.0 * c * qj
    kept = 1
    truncated = False
    q_terms = [qj]
    for _ in range(order - 1):
        aj = -1j * derivative(qj, ds) - c * qj**2
        q_next = aj / bj
        if np.mean(np.abs(q_next) > np.abs(qj)) > 0.5:
            truncated = True
            break
        qj = q_next
        q_terms.append(qj)
        qbar = qbar + qj
        bj = bj + 2.0 * c * qj
        kept += 1

    phase = cumulative_simpson(bj, ds)
    # |exp(i*phase)| = exp(-Im phase); keep the closed form inside double range
    growth = float(np.max(-phase.imag))
    if growth > 600.0:
        raise ValidationError(
            f"accumulated phase range exp({growth:.0f}) exceeds double precision; "
            "reduce the timescale or split the trajectory"
        )
    env = np.exp(1j * phase)
    qtilde0 = rc.q0 - qbar[0]
    denom = 1.0 - qtilde0 * cumulative_simpson(1j * c * env, ds)
    qtilde = qtilde0 * env / denom
    q = qbar + qtilde
    diagnostics = {
        "orders_kept": kept,
        "hierarchy_truncated": truncated,
        "terms": q_terms,
        "max_abs_term": [float(np.max(np.abs(t))) for t in q_terms],
    }
    return q, qbar, qtilde, diagnostics


def riccati_integrate(
    s: np.ndarray,
    rc: RiccatiCoefficients,
    substeps: int = DEFAULT.riccati_substeps,
) -> np.ndarray:
    """Direct RK4 integration of the equation from q(0) = rc.q0.

    Coefficients are cubic-splined between samples so midpoint stages see
    smooth values.
    """
    fa, fb, fc = (CubicSpline(s, z) for z in (rc.a, rc.b, rc.c))

    def rhs(si, q):
        return 1j * (-fa(si) + fb(si) * q + fc(si) * q * q)

    out = np.zeros(len(s), dtype=complex)
    out[0] = rc.q0
    for k in range(len(s) - 1):
        q = out[k]
        t = s[k]
        h = (s[k + 1] - s[k]) / substeps
        for _ in range(substeps):
            k1 = rhs(t, q)
            k2 = rhs(t + h / 2.0, q + h / 2.0 * k1)
            k3 = rhs(t + h / 2.0, q + h / 2.0 * k2)
            k4 = rhs(t + h, q + h * k3)
            q = q + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t += h
        out[k + 1] = q
    return out
