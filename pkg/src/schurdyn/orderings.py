"""Eigenvalue reordering of Schur forms and the associated basis vectors.

A Schur form is not unique: any two adjacent diagonal entries can be swapped
by a small unitary similarity that preserves triangularity. Composing such
swaps yields (a) the growth ordering, with the most amplifying eigenvalue
first, and (b) "bring to front" orderings that expose, for each eigenvalue,
an eigenvector together with its orthogonal companion vector. The family of
all these vectors is the working basis for the evolution engines.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import NearDegenerateError, ValidationError
from .linalg import SchurDecomposition, as_square_matrix, schur_decompose

__all__ = [
    "OrderedSchur",
    "BasisFamily",
    "swap_adjacent",
    "growth_order",
    "reorder_to",
    "bring_to_front",
    "build_basis_family",
    "completeness_rank",
]


@dataclass(frozen=True)
class OrderedSchur:
    """A Schur decomposition whose diagonal order carries meaning."""

    base: SchurDecomposition
    order_tag: str

    @property
    def unitary(self) -> np.ndarray:
        return self.base.unitary

    @property
    def triangular(self) -> np.ndarray:
        return self.base.triangular

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.base.eigenvalues

    @property
    def dim(self) -> int:
        return self.base.dim


@dataclass(frozen=True)
class BasisFamily:
    """All ordered-Schur basis vectors of one matrix.

    chi[:, j] are the orthonormal columns of the reference (growth-ordered)
    unitary. For each j >= 2 (index j-2 in the arrays), xi[:, j-2] is the
    eigenvector of eigenvalue lambda_j and eta[:, j-2] its orthogonal
    companion associated with lambda_1; both are columns 1 and 2 of the
    accumulated unitary of the "j brought to front" form, which is cached
    in full in unitaries[j-2] so downstream gauge fixing can phase-align
    whole columns.
    """

    eigenvalues: np.ndarray          # reference order (lambda_1 ... lambda_n)
    chi: np.ndarray                  # (n, n)
    xi: np.ndarray                   # (n, n-1)
    eta: np.ndarray                  # (n, n-1)
    coupling_c1: np.ndarray          # C_{1j}, j = 2..n, from the reference form
    coupling_cj: np.ndarray          # C_j = <xi_j|H|eta_j>, j = 2..n
    schur_a: np.ndarray              # reference triangular form (all C_{ij})
    unitaries: np.ndarray            # (n-1, n, n), accumulated U per j

    @property
    def dim(self) -> int:
        return self.chi.shape[0]


def _check_gap(lams: np.ndarray, config: Tolerances, where: str, matrix_scale: float = 0.0):
    # the matrix norm keeps the threshold meaningful when all eigenvalues
    # coalesce near zero (defective limit)
    scale = max(np.max(np.abs(lams)), matrix_scale, 1e-300)
    n = len(lams)
    for i in range(n):
        for j in range(i + 1, n):
            if abs(lams[i] - lams[j]) < config.gap_rel * scale:
                raise NearDegenerateError(
                    f"eigenvalues {lams[i]} and {lams[j]} are closer than "
                    f"tol_gap in {where} (exceptional-point vicinity)",
                    pair=(complex(lams[i]), complex(lams[j])),
                )


def swap_adjacent(os: OrderedSchur, j: int, config: Tolerances = DEFAULT) -> OrderedSchur:
    """Exchange diagonal entries j-1 and j (1-based) by a unitary similarity.

    Uses the 2x2 block built from z = (lam_j - lam_{j-1}) / C_{j-1,j}; when
    the coupling vanishes a plain permutation block suffices.
    """
    n = os.dim
    if not 2 <= j <= n:
        raise ValidationError(f"swap position j={j} out of range 2..{n}")
    a = os.triangular
    i = j - 2  # 0-based row of the 2x2 block
    lam_prev, lam_next = a[i, i], a[i + 1, i + 1]
    scale = max(np.linalg.norm(a), 1e-300)
    lam_scale = max(np.max(np.abs(os.eigenvalues)), float(np.linalg.norm(a)), 1e-300)
    if abs(lam_next - lam_prev) < config.gap_rel * lam_scale:
        raise NearDegenerateError(
            f"cannot swap equal eigenvalues at positions {j-1}, {j}",
            pair=(complex(lam_prev), complex(lam_next)),
        )
    coup = a[i, i + 1]
    if abs(coup) < config.coupling_zero_rel * scale:
        w = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    else:
        z = (lam_next - lam_prev) / coup
        w = np.array([[1.0, -np.conj(z)], [z, 1.0]], dtype=complex) / np.sqrt(1.0 + abs(z) ** 2)
    u_j = np.eye(n, dtype=complex)
    u_j[i:i + 2, i:i + 2] = w
    a_new = u_j.conj().T @ a @ u_j
    # the similarity zeroes the subdiagonal of the block by construction
    a_new[i + 1, i] = 0.0
    a_new = np.triu(a_new)
    return OrderedSchur(
        SchurDecomposition(os.unitary @ u_j, a_new),
        order_tag=f"{os.order_tag}; swapped {j-1}<->{j}",
    )


def growth_order(os_in, config: Tolerances = DEFAULT) -> OrderedSchur:
    """Reorder so Im(lambda) descends along the diagonal (ties: Re descends).

    The first unitary column of the result is the most amplifying
    eigenvector of the source matrix. Only adjacent swaps are used, so all
    Schur invariants are preserved.
    """
    if isinstance(os_in, SchurDecomposition):
        os_cur = OrderedSchur(os_in, "raw")
    else:
        os_cur = os_in
    _check_gap(os_cur.eigenvalues, config, "growth_order",
               float(np.linalg.norm(os_cur.triangular)))

    def key(lam):
        return (-lam.imag, -lam.real)

    n = os_cur.dim
    # bubble sort with adjacent swaps; n is small
    changed = True
    while changed:
        changed = False
        lams = os_cur.eigenvalues
        for j in range(2, n + 1):
            if key(lams[j - 2]) > key(lams[j - 1]):
                os_cur = swap_adjacent(os_cur, j, config)
                lams = os_cur.eigenvalues
                changed = True
    return OrderedSchur(os_cur.base, "growth-ordered")


def reorder_to(os_in, target: np.ndarray, config: Tolerances = DEFAULT) -> OrderedSchur:
    """Reorder the diagonal to match the `target` eigenvalue sequence.

    `target` must be a permutation of the current diagonal; matching is by
    exact nearest value. Used to keep eigenvalue branches continuous along
    a trajectory.
    """
    if isinstance(os_in, SchurDecomposition):
        os_cur = OrderedSchur(os_in, "raw")
    else:
        os_cur = os_in
    n = os_cur.dim
    target = np.asarray(target, dtype=complex)
    if target.shape != (n,):
        raise ValidationError("target order must list every eigenvalue once")
    # selection sort by adjacent swaps: fix positions left to right
    for pos in range(n - 1):
        lams = os_cur.eigenvalues
        idx = int(np.argmin(np.abs(lams[pos:] - target[pos]))) + pos
        for j in range(idx, pos, -1):
            os_cur = swap_adjacent(os_cur, j + 1, config)
    return OrderedSchur(os_cur.base, "reordered")


def bring_to_front(os: OrderedSchur, j: int, config: Tolerances = DEFAULT) -> OrderedSchur:
    """Move eigenvalue j (1-based) to the front, keeping the rest in order.

    The result's diagonal reads lambda_j, lambda_1, ..., lambda_{j-1},
    lambda_{j+1}, ...; its first unitary column is the eigenvector xi_j and
    the second column is the companion eta_j.
    """
    n = os.dim
    if not 2 <= j <= n:
        raise ValidationError(f"bring_to_front index j={j} out of range 2..{n}")
    os_cur = os
    for pos in range(j, 1, -1):
        os_cur = swap_adjacent(os_cur, pos, config)
    return OrderedSchur(os_cur.base, f"{j} brought to front")


def build_basis_family(h, config: Tolerances = DEFAULT) -> BasisFamily:
    """Growth-order the Schur form of `h` and extract every (xi_j, eta_j) pair."""
    h = as_square_matrix(h)
    sd = schur_decompose(h, config=config)
    ref = growth_order(sd, config)
    return family_from_reference(ref, config)


def family_from_reference(ref: OrderedSchur, config: Tolerances = DEFAULT) -> BasisFamily:
    """Extract the basis family from an already-ordered reference form."""
    n = ref.dim
    _check_gap(ref.eigenvalues, config, "build_basis_family",
               float(np.linalg.norm(ref.triangular)))
    xi = np.zeros((n, max(n - 1, 0)), dtype=complex)
    eta = np.zeros_like(xi)
    c_j = np.zeros(max(n - 1, 0), dtype=complex)
    unis = np.zeros((max(n - 1, 0), n, n), dtype=complex)
    for j in range(2, n + 1):
        fronted = bring_to_front(ref, j, config)
        unis[j - 2] = fronted.unitary
        xi[:, j - 2] = fronted.unitary[:, 0]
        eta[:, j - 2] = fronted.unitary[:, 1]
        c_j[j - 2] = fronted.triangular[0, 1]
    return BasisFamily(
        eigenvalues=ref.eigenvalues.copy(),
        chi=ref.unitary.copy(),
        xi=xi,
        eta=eta,
        coupling_c1=ref.triangular[0, 1:].copy(),
        coupling_cj=c_j,
        schur_a=ref.triangular.copy(),
        unitaries=unis,
    )


def completeness_rank(fam: BasisFamily, tol: float = DEFAULT.schur_check):
    """Rank and smallest singular value of the columns {chi_1, eta_2..eta_n}.

    Full rank certifies that this non-orthogonal set spans the whole space;
    a deficient rank is a valid report, not an error.
    """
    cols = np.column_stack([fam.chi[:, :1], fam.eta])
    svals = np.linalg.svd(cols, compute_uv=False)
    rank = int(np.sum(svals > tol * svals[0])) if svals[0] > 0 else 0
    return rank, float(svals[-1])
