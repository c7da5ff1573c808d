"""schurdyn: evolution of slowly driven non-Hermitian Hamiltonians.

The library builds ordered Schur decompositions of a time-dependent matrix,
transports the resulting bases along the drive trajectory, and evolves
states with a family of approximations (leading, subleading, full) that are
all validated against an exact exponential-midpoint integrator.
"""

from .config import DEFAULT, Tolerances
from .engines import (
    EvolutionReport,
    RiccatiCoefficients,
    adiabatic_multipliers,
    band_weights,
    detect_transition,
    evolve_2x2,
    evolve_nxn,
    hermitian_iterate,
    integrate_exact,
    riccati_integrate,
    riccati_solve,
)
from .errors import (
    ConvergenceError,
    GridError,
    NearDegenerateError,
    RatioUndefinedError,
    SchurDynError,
    ValidationError,
)
from .harness import ExperimentConfig, load_preset, preset_names, run_experiment, run_sweep
from .linalg import (
    SchurDecomposition,
    complex_sqrt_principal,
    eig_residual,
    schur_decompose,
)
from .models import (
    EpModelParams,
    StateRatio,
    avoided_crossing_model,
    ep_eigenvalues,
    ep_model,
    state_ratio,
    three_level_model,
)
from .orderings import (
    BasisFamily,
    OrderedSchur,
    bring_to_front,
    build_basis_family,
    completeness_rank,
    growth_order,
    reorder_to,
    swap_adjacent,
)
from .trajectory import (
    CoherenceSeries,
    HamiltonianModel,
    TrajectoryGrid,
    berry_connection,
    coherence_series,
    dynamical_phase,
    gauge_fix,
    sample_trajectory,
)

__version__ = "0.1.0"
