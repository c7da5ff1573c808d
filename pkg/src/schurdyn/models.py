"""Built-in Hamiltonian models and state-ratio helpers.

The main model is a two-level gain/loss system whose parameter loop circles
a point where both eigenvalues and eigenvectors coalesce. Companion models
(a Hermitian avoided crossing and a smoothly driven three-level system)
exercise the engines away from that regime.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import RatioUndefinedError, ValidationError
from .linalg import complex_sqrt_principal
from .trajectory import HamiltonianModel

__all__ = [
    "EpModelParams",
    "StateRatio",
    "ep_model",
    "ep_eigenvalues",
    "state_ratio",
    "avoided_crossing_model",
    "three_level_model",
]


@dataclass(frozen=True)
class EpModelParams:
    """Two-level gain/loss model: H = [[w, c], [c, -w]] with w on a loop.

    The loop is w(s) = exp(2*pi*i*s*cycles) + center_offset, s in [0, 1]
    spanning all cycles; `center_offset` defaults to -i*c, which centers
    the loop on the coalescence point. `timescale` is the duration of one
    cycle, so the engine timescale is timescale * cycles.
    """

    c: float = 2.0
    timescale: float = 50.0
    cycles: int = 1
    center_offset: complex | None = None

    def __post_init__(self):
        if self.c == 0.0:
            raise ValidationError("coupling c must be nonzero")
        if self.timescale <= 0.0:
            raise ValidationError("timescale must be positive")
        if self.cycles < 1:
            raise ValidationError("cycles must be a positive integer")

    @property
    def center(self) -> complex:
        return -1j * self.c if self.center_offset is None else complex(self.center_offset)


def ep_model(params: EpModelParams) -> HamiltonianModel:
    """Build the loop-driven two-level model from its parameter record."""
    c = params.c
    center = params.center
    cycles = params.cycles

    def eval_h(s: float) -> np.ndarray:
        w = np.exp(2j * np.pi * s * cycles) + center
        return np.array([[w, c], [c, -w]], dtype=complex)

    return HamiltonianModel(
        dim=2,
        eval=eval_h,
        timescale=params.timescale * cycles,
        descriptor={
            "model": "ep2",
            "c": c,
            "timescale": params.timescale,
            "cycles": cycles,
            "center": center,
        },
    )


def ep_eigenvalues(params: EpModelParams, s: float) -> complex:
    """Analytic eigenvalue magnitude branch: the pair is +/- this value."""
    w = np.exp(2j * np.pi * s * params.cycles) + params.center
    return complex_sqrt_principal(params.c**2 + w**2)


@dataclass(frozen=True)
class StateRatio:
    """Component ratio z = psi_2 / psi_1 of a two-level state (1, z)."""

    z: complex

    @property
    def x(self) -> float:
        return self.z.real

    @property
    def y(self) -> float:
        return self.z.imag


def state_ratio(psi, tol: float = 1e-12) -> StateRatio:
    """Ratio of the second to the first component; undefined when psi_1 ~ 0."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (2,):
        raise ValidationError("state ratio is defined for two-level states")
    norm = np.linalg.norm(psi)
    if norm == 0.0 or abs(psi[0]) <= tol * norm:
        raise RatioUndefinedError("first component vanishes; ratio at infinity")
    return StateRatio(z=complex(psi[1] / psi[0]))


def avoided_crossing_model(
    gap: float = 1.0, sweep: float = 2.0, timescale: float = 50.0
) -> HamiltonianModel:
    """Hermitian two-level sweep through an avoided crossing.

    H(s) = [[delta(s), gap/2], [gap/2, -delta(s)]] with delta running
    linearly from -sweep to +sweep; the minimal level splitting is `gap`.
    """
    half = gap / 2.0

    def eval_h(s: float) -> np.ndarray:
        delta = sweep * (2.0 * s - 1.0)
        return np.array([[delta, half], [half, -delta]], dtype=complex)

    return HamiltonianModel(
        dim=2,
        eval=eval_h,
        timescale=timescale,
        descriptor={"model": "avoided_crossing", "gap": gap, "sweep": sweep,
                    "timescale": timescale},
    )


def three_level_model(
    drive: float = 0.1, timescale: float = 50.0, cycles: int = 1
) -> HamiltonianModel:
    """Smoothly driven non-Hermitian three-level system.

    Static part: well-separated complex levels with strong generic mixing,
    so no eigenvector hugs a coordinate axis. Drive: a two-parameter loop
    coupling all levels with strength `drive`, gentle enough that the
    ordered-basis machinery stays far from any coalescence along the path.
    """
    d0 = np.diag([0.3 + 0.8j, -0.2 + 0.0j, 0.1 - 0.8j]).astype(complex)
    d0 += 1.2 * np.array(
        [[0.0, 0.5 + 0.2j, 0.35 - 0.1j],
         [0.45 + 0.1j, 0.0, 0.4 + 0.15j],
         [0.3 - 0.2j, 0.5 + 0.1j, 0.0]],
        dtype=complex,
    )
    v1 = np.array(
        [[0.0, 0.5, 0.2], [0.3, 0.1, 0.4], [0.1, 0.25, -0.1]], dtype=complex
    )
    v2 = np.array(
        [[0.1, 0.2j, 0.3], [0.15, -0.05, 0.2 + 0.1j], [0.25, 0.1, 0.05]],
        dtype=complex,
    )

    def eval_h(s: float) -> np.ndarray:
        ang = 2.0 * np.pi * s * cycles
        return d0 + drive * (np.cos(ang) * v1 + np.sin(ang) * v2)

    return HamiltonianModel(
        dim=3,
        eval=eval_h,
        timescale=timescale * cycles,
        descriptor={"model": "three_level", "drive": drive,
                    "timescale": timescale, "cycles": cycles},
    )
