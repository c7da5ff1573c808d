from .exact import integrate_exact
from .hermitian import hermitian_iterate
from .n_level import evolve_nxn
from .report import EvolutionReport
from .riccati import RiccatiCoefficients, riccati_integrate, riccati_solve
from .two_level import adiabatic_multipliers, band_weights, detect_transition, evolve_2x2

__all__ = [
    "EvolutionReport",
    "RiccatiCoefficients",
    "adiabatic_multipliers",
    "band_weights",
    "detect_transition",
    "evolve_2x2",
    "evolve_nxn",
    "hermitian_iterate",
    "integrate_exact",
    "riccati_integrate",
    "riccati_solve",
]
