"""Sampled trajectories of a time-dependent Hamiltonian.

A model is sampled on a uniform grid of scaled time s in [0, s_max]. At each
point the Schur machinery produces the ordered bases; eigenvalue branches are
kept continuous between points, all basis vectors are put in the parallel
transport gauge, and the derived scalar fields (couplings, connections,
dynamical phases) are tabulated for the evolution engines.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import GridError, NearDegenerateError, ValidationError
from .linalg import as_square_matrix, schur_decompose
from .orderings import BasisFamily, OrderedSchur, family_from_reference, growth_order, reorder_to
from .quadrature import cumulative_simpson, derivative

__all__ = [
    "HamiltonianModel",
    "TrajectoryGrid",
    "CoherenceSeries",
    "sample_trajectory",
    "gauge_fix",
    "berry_connection",
    "dynamical_phase",
    "coherence_series",
]


@dataclass(frozen=True)
class HamiltonianModel:
    """Map from scaled time to a Hamiltonian matrix, plus the drive timescale.

    `timescale` is the ratio of physical to scaled time: the evolution
    equation is  i * timescale * d|psi>/ds = H(s)|psi>.
    """

    dim: int
    eval: Callable[[float], np.ndarray]
    timescale: float
    descriptor: dict = field(default_factory=dict)

    def matrix(self, s: float) -> np.ndarray:
        h = as_square_matrix(self.eval(s))
        if h.shape[0] != self.dim:
            raise ValidationError(f"model returned shape {h.shape}, expected dim {self.dim}")
        return h


@dataclass
class TrajectoryGrid:
    """Gauge-fixed basis and scalar data sampled along a trajectory.

    Index conventions: time index k runs over the grid; band indices are
    0-based here (band 0 is the reference / initially most amplifying
    branch). The (xi, eta) pair for band j >= 1 sits at pair index j-1.
    """

    model: HamiltonianModel
    s: np.ndarray                 # (M,)
    step: float
    lam: np.ndarray               # (M, n) branch-continuous eigenvalues
    chi: np.ndarray               # (M, n, n): chi[k, :, j]
    xi: np.ndarray                # (M, n, n-1)
    eta: np.ndarray               # (M, n, n-1)
    coupling: np.ndarray          # (M, n, n): <chi_i|H|chi_j>, strictly upper
    coupling_pair: np.ndarray     # (M, n-1): <xi_j|H|eta_j>
    omega: np.ndarray             # (M, n): dynamical phases
    conn_chi: np.ndarray          # (M, n, n): i<chi_k|chi_j'>
    conn_pair_12: np.ndarray      # (M, n-1): i<eta_j|xi_j'>
    conn_pair_21: np.ndarray      # (M, n-1): i<xi_j|eta_j'>
    config: Tolerances

    @property
    def dim(self) -> int:
        return self.model.dim

    @property
    def n_points(self) -> int:
        return len(self.s)

    @property
    def timescale(self) -> float:
        return self.model.timescale

    def u_factor(self, k_band: int, j_band: int) -> np.ndarray:
        """exp{i[Omega_k - Omega_j]} on the grid."""
        return np.exp(1j * (self.omega[:, k_band] - self.omega[:, j_band]))

    def hamiltonians(self) -> np.ndarray:
        return np.array([self.model.matrix(si) for si in self.s])


@dataclass
class CoherenceSeries:
    """Truncated inter-band coherence factor series on a grid.

    `terms[i]` is the (i+1)-th order contribution; `total` their sum.
    For the multi-band flavors the leading axes index the band pair.
    """

    flavor: str
    terms: list
    total: np.ndarray
    converged: np.ndarray
    n_kept: int


def _match_branches(prev: np.ndarray, new: np.ndarray, config: Tolerances, s_at: float):
    """Permutation aligning `new` eigenvalues to the `prev` branch order."""
    n = len(prev)
    dist = np.abs(prev[:, None] - new[None, :])
    perm = np.full(n, -1, dtype=int)
    used = np.zeros(n, dtype=bool)
    # greedy nearest assignment, smallest distances first; n is tiny
    order = np.dstack(np.unravel_index(np.argsort(dist, axis=None), dist.shape))[0]
    for i, j in order:
        if perm[i] == -1 and not used[j]:
            perm[i] = j
            used[j] = True
    for i in range(n):
        row = dist[i]
        nearest = row[perm[i]]
        others = np.delete(row, perm[i])
        if others.size and others.min() < config.branch_ambiguity * nearest:
            raise GridError(
                f"eigenvalue branch matching ambiguous at s={s_at:.6g} "
                f"(second-nearest within {config.branch_ambiguity}x of nearest); "
                "use a finer grid"
            )
    return perm


def gauge_fix(raw_bases: Sequence[BasisFamily], config: Tolerances = DEFAULT):
    """Parallel-transport the phases of every tracked column.

    Each vector at point k is multiplied by the unit phase making its
    overlap with the same vector at point k-1 real and positive; the first
    point is untouched. Idempotent. Raises GridError on vanishing overlap.
    """
    if not raw_bases:
        return []
    n = raw_bases[0].dim
    out = [raw_bases[0]]
    for k in range(1, len(raw_bases)):
        prev, cur = out[-1], raw_bases[k]
        chi = cur.chi.copy()
        for j in range(n):
            chi[:, j] = _aligned(prev.chi[:, j], chi[:, j], config, k, f"chi_{j+1}")
        unis = cur.unitaries.copy()
        for p in range(n - 1):
            for col in range(n):
                unis[p, :, col] = _aligned(
                    prev.unitaries[p, :, col], unis[p, :, col], config, k, f"pair{p+2}/col{col}"
                )
        out.append(
            BasisFamily(
                eigenvalues=cur.eigenvalues,
                chi=chi,
                xi=unis[:, :, 0].T.copy() if n > 1 else cur.xi,
                eta=unis[:, :, 1].T.copy() if n > 1 else cur.eta,
                coupling_c1=cur.coupling_c1,
                coupling_cj=cur.coupling_cj,
                schur_a=cur.schur_a,
                unitaries=unis,
            )
        )
    return out


def _aligned(v_prev, v_cur, config, k, label):
    ov = np.vdot(v_prev, v_cur)
    if abs(ov) < config.overlap_min:
        raise GridError(
            f"vanishing overlap for {label} between points {k-1} and {k}; "
            "grid too coarse or an exceptional point was crossed"
        )
    return v_cur * (np.conj(ov) / abs(ov))


def sample_trajectory(
    model: HamiltonianModel,
    s_max: float = 1.0,
    steps: int = 4096,
    config: Tolerances = DEFAULT,
) -> TrajectoryGrid:
    """Sample, branch-match, gauge-fix and tabulate a model trajectory.

    The reference order is the growth order at s = 0; subsequent points
    follow eigenvalue branches by nearest-in-the-complex-plane matching, so
    every tabulated quantity is continuous in s.
    """
    if steps < config.min_steps:
        raise ValidationError(f"steps={steps} below the minimum {config.min_steps}")
    n = model.dim
    s = np.linspace(0.0, s_max, steps + 1)
    ds = s[1] - s[0]

    families = []
    lam = np.zeros((steps + 1, n), dtype=complex)
    for k, sk in enumerate(s):
        h = model.matrix(sk)
        sd = schur_decompose(h, config=config)
        try:
            if k == 0:
                ref = growth_order(sd, config)
            else:
                perm = _match_branches(lam[k - 1], sd.eigenvalues, config, sk)
                ref = reorder_to(sd, sd.eigenvalues[perm], config)
        except NearDegenerateError as exc:
            exc.location = sk
            raise
        lam[k] = ref.eigenvalues
        families.append(family_from_reference(ref, config))

    families = gauge_fix(families, config)

    chi = np.stack([f.chi for f in families])
    xi = np.stack([f.xi for f in families])
    eta = np.stack([f.eta for f in families])

    # couplings must be recomputed from the gauge-fixed vectors
    hs = np.array([model.matrix(sk) for sk in s])
    coupling = np.einsum("kia,kij,kjb->kab", np.conj(chi), hs, chi)
    coupling *= np.triu(np.ones((n, n)), 1)[None, :, :]
    coupling_pair = np.einsum("kia,kij,kja->ka", np.conj(xi), hs, eta)

    omega = model.timescale * cumulative_simpson(lam.T, ds).T

    dchi = derivative(chi, ds, axis=0)
    conn_chi = 1j * np.einsum("kia,kib->kab", np.conj(chi), dchi)
    dxi = derivative(xi, ds, axis=0)
    deta = derivative(eta, ds, axis=0)
    conn_pair_12 = 1j * np.einsum("kia,kia->ka", np.conj(eta), dxi)
    conn_pair_21 = 1j * np.einsum("kia,kia->ka", np.conj(xi), deta)

    return TrajectoryGrid(
        model=model,
        s=s,
        step=ds,
        lam=lam,
        chi=chi,
        xi=xi,
        eta=eta,
        coupling=coupling,
        coupling_pair=coupling_pair,
        omega=omega,
        conn_chi=conn_chi,
        conn_pair_12=conn_pair_12,
        conn_pair_21=conn_pair_21,
        config=config,
    )


def _vector_series(grid: TrajectoryGrid, vec_id) -> np.ndarray:
    kind, idx = vec_id
    if kind == "chi":
        return grid.chi[:, :, idx - 1]
    if kind == "xi":
        return grid.xi[:, :, idx - 2]
    if kind == "eta":
        return grid.eta[:, :, idx - 2]
    raise ValidationError(f"unknown vector id {vec_id!r}")


def berry_connection(grid: TrajectoryGrid, bra, ket) -> np.ndarray:
    """i <bra | d(ket)/ds> per grid point, by central differences.

    `bra`/`ket` are ("chi", j) with j = 1..n, or ("xi"|"eta", j) with
    j = 2..n (1-based band labels).
    """
    vb = _vector_series(grid, bra)
    vk = _vector_series(grid, ket)
    return 1j * np.einsum("ki,ki->k", np.conj(vb), derivative(vk, grid.step, axis=0))


def dynamical_phase(grid: TrajectoryGrid, band: int) -> np.ndarray:
    """Accumulated phase: timescale times the running integral of lambda_band."""
    if not 1 <= band <= grid.dim:
        raise ValidationError(f"band {band} out of range")
    return grid.omega[:, band - 1].copy()


def _series_sum(first, recurse, n_max, tol_rel):
    """Common series loop: terms, sum, per-point convergence flags."""
    terms = [first]
    for _ in range(n_max - 1):
        terms.append(recurse(terms[-1]))
    total = np.sum(terms, axis=0)
    mag_first = np.abs(terms[0])
    mag_last = np.abs(terms[-1])
    shrinking = np.ones_like(mag_first, dtype=bool)
    for a, b in zip(terms[:-1], terms[1:]):
        shrinking &= np.abs(b) <= np.abs(a)
    converged = (mag_last < tol_rel * np.maximum(mag_first, 1e-300)) & shrinking
    return terms, total, converged


def coherence_series(
    grid: TrajectoryGrid,
    flavor: str,
    n_max: int | None = None,
    pair: int | None = None,
    config: Tolerances = DEFAULT,
) -> CoherenceSeries:
    """Inter-band coherence factor series of the requested flavor.

    flavor "hermitian": the full matrix rho_kj built from the orthonormal
    basis connections, with the cross-band term in the recursion.
    flavor "a": rho for the reference band against all others, using the
    connection-minus-coupling combination (reduces to the two-level rho_a).
    flavor "b": the scalar series for one (xi_j, eta_j) pair; `pair`
    selects j (default 2).

    Terms are truncated early if they start growing; `converged` marks the
    points where the last kept term is below ``series_rel`` of the first
    and the terms shrank monotonically.
    """
    if n_max is None:
        n_max = config.series_n_max
    T = grid.timescale
    ds = grid.step
    n = grid.dim

    if flavor == "hermitian":
        diag = np.arange(n)
        gaps = grid.lam[:, :, None] - grid.lam[:, None, :]  # (M, k, j)
        off = np.abs(gaps) + np.eye(n)[None]
        if np.any(off < config.gap_rel * max(np.max(np.abs(grid.lam)), 1e-300)):
            raise NearDegenerateError("vanishing gap in coherence series")
        gaps[:, diag, diag] = 1.0  # dummy; diagonal entries are zeroed below
        conn = grid.conn_chi
        first = conn / (T * gaps)
        first[:, diag, diag] = 0.0

        def recurse(prev):
            # prev has zero diagonal, so prev @ conn already omits l == k
            dprev = derivative(prev, ds, axis=0)
            cross = np.einsum("kml,klj->kmj", prev, conn)
            out = 1j * (dprev + 1j * cross) / (T * gaps)
            out[:, diag, diag] = 0.0
            return out

        terms, total, converged = _series_sum(first, recurse, n_max, config.series_rel)

    elif flavor == "a":
        gaps = grid.lam[:, 0:1] - grid.lam[:, 1:]            # (M, n-1)
        if np.any(np.abs(gaps) < config.gap_rel * np.max(np.abs(grid.lam))):
            raise NearDegenerateError("vanishing gap in coherence series")
        ceff = grid.conn_chi[:, 0, 1:] - T * grid.coupling[:, 0, 1:]   # C^a_{1j}
        ceff_lj = grid.conn_chi[:, 1:, 1:] - T * grid.coupling[:, 1:, 1:]  # C^a_{lj}, l,j >= 2
        first = ceff / (T * gaps)

        def recurse(prev):
            dprev = derivative(prev, ds, axis=0)
            cross = np.einsum("kl,klj->kj", prev, ceff_lj)
            return 1j * (dprev + 1j * cross) / (T * gaps)

        terms, total, converged = _series_sum(first, recurse, n_max, config.series_rel)

    elif flavor == "b":
        j = 2 if pair is None else pair
        idx = j - 2
        gaps = grid.lam[:, 0] - grid.lam[:, j - 1]
        if np.any(np.abs(gaps) < config.gap_rel * np.max(np.abs(grid.lam))):
            raise NearDegenerateError("vanishing gap in coherence series")
        first = grid.conn_pair_12[:, idx] / (T * gaps)

        def recurse(prev):
            return 1j * derivative(prev, ds, axis=0) / (T * gaps)

        terms, total, converged = _series_sum(first, recurse, n_max, config.series_rel)

    else:
        raise ValidationError(f"unknown coherence flavor {flavor!r}")

    # truncate trailing terms that grow on a majority of points
    kept = [terms[0]]
    for t_prev, t_next in zip(terms[:-1], terms[1:]):
        if np.mean(np.abs(t_next) > np.abs(t_prev)) > 0.5:
            break
        kept.append(t_next)
    total = np.sum(kept, axis=0)
    return CoherenceSeries(flavor=flavor, terms=kept, total=total,
                           converged=converged, n_kept=len(kept))
