"""Dense complex linear algebra for small matrices.

Provides the complex Schur decomposition (Hessenberg reduction followed by
Wilkinson-shifted QR with deflation), eigenpair residuals, and the principal
complex square root. Everything here is pure and operates on plain numpy
arrays; sizes beyond a few dozen are out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import ConvergenceError, ValidationError

__all__ = [
    "SchurDecomposition",
    "as_square_matrix",
    "as_vector",
    "schur_decompose",
    "eig_residual",
    "complex_sqrt_principal",
]


def as_square_matrix(h) -> np.ndarray:
    """Validate and return a finite square complex matrix."""
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] < 1:
        raise ValidationError(f"expected a square matrix, got shape {h.shape}")
    if not np.all(np.isfinite(h.real)) or not np.all(np.isfinite(h.imag)):
        raise ValidationError("matrix has non-finite entries")
    return h


def as_vector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1 or v.shape[0] < 1:
        raise ValidationError(f"expected a vector, got shape {v.shape}")
    if not np.all(np.isfinite(v.real)) or not np.all(np.isfinite(v.imag)):
        raise ValidationError("vector has non-finite entries")
    return v


@dataclass(frozen=True)
class SchurDecomposition:
    """Unitary/triangular factor pair with the diagonal eigenvalue order.

    Satisfies  unitary @ triangular @ unitary^H == source  with `unitary`
    unitary and `triangular` upper triangular; `eigenvalues` is exactly the
    diagonal of `triangular`.
    """

    unitary: np.ndarray
    triangular: np.ndarray
    eigenvalues: np.ndarray = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", np.diag(self.triangular).copy())

    @property
    def dim(self) -> int:
        return self.triangular.shape[0]

    def reconstruct(self) -> np.ndarray:
        return self.unitary @ self.triangular @ self.unitary.conj().T

    def check(self, source: np.ndarray, tol: float = DEFAULT.schur_check) -> None:
        """Raise unless unitarity, triangularity and reconstruction hold at `tol`."""
        n = self.dim
        scale = max(np.linalg.norm(source), 1.0)
        err_u = np.linalg.norm(self.unitary.conj().T @ self.unitary - np.eye(n))
        if err_u > tol:
            raise ValidationError(f"unitarity violated: {err_u:.3e} > {tol:.3e}")
        lower = np.tril(self.triangular, -1)
        if lower.size and np.abs(lower).max() > tol * scale:
            raise ValidationError("triangularity violated")
        err_r = np.linalg.norm(self.reconstruct() - source)
        if err_r > tol * scale:
            raise ValidationError(f"reconstruction violated: {err_r:.3e}")


def _givens(a: complex, b: complex):
    """Unitary 2x2 G with G @ (a, b) = (r, 0)."""
    na, nb = abs(a), abs(b)
    if nb == 0.0:
        return np.eye(2, dtype=complex)
    r = np.hypot(na, nb)
    return np.array([[np.conj(a) / r, np.conj(b) / r], [-b / r, a / r]], dtype=complex)


def _hessenberg(h: np.ndarray):
    """Householder reduction to upper Hessenberg form; returns (a, u)."""
    a = h.copy()
    n = a.shape[0]
    u = np.eye(n, dtype=complex)
    for k in range(n - 2):
        x = a[k + 1:, k].copy()
        nx = np.linalg.norm(x)
        if nx == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0.0 else 1.0
        v = x.copy()
        v[0] += phase * nx
        nv = np.linalg.norm(v)
        if nv == 0.0:
            continue
        v /= nv
        # apply P = I - 2 v v^H from both sides
        a[k + 1:, k:] -= 2.0 * np.outer(v, v.conj() @ a[k + 1:, k:])
        a[:, k + 1:] -= 2.0 * np.outer(a[:, k + 1:] @ v, v.conj())
        u[:, k + 1:] -= 2.0 * np.outer(u[:, k + 1:] @ v, v.conj())
    return a, u


def _wilkinson_shift(a: np.ndarray) -> complex:
    """Eigenvalue of the trailing 2x2 block closest to its last entry."""
    x, y = a[-2, -2], a[-2, -1]
    z, w = a[-1, -2], a[-1, -1]
    tr = x + w
    disc = np.sqrt((x - w) ** 2 / 4.0 + y * z + 0j)
    mu1 = tr / 2.0 + disc
    mu2 = tr / 2.0 - disc
    return mu1 if abs(mu1 - w) <= abs(mu2 - w) else mu2


def schur_decompose(
    h, tol: float | None = None, config: Tolerances = DEFAULT
) -> SchurDecomposition:
    """Complex Schur decomposition h = U A U^H with A upper triangular.

    Hessenberg reduction followed by single-shift (Wilkinson) QR iteration;
    subdiagonal entries below ``config.schur_deflation * ||h||_F`` deflate to
    zero. The diagonal order is whatever the iteration produces; reordering
    is a separate concern.

    Raises ConvergenceError if the sweep budget ``schur_sweep_factor * n**2``
    is exhausted, carrying the residual subdiagonal norm.
    """
    h = as_square_matrix(h)
    n = h.shape[0]
    if tol is None:
        tol = config.schur_check
    if n == 1:
        return SchurDecomposition(np.eye(1, dtype=complex), h.copy())

    scale = np.linalg.norm(h)
    if scale == 0.0:
        return SchurDecomposition(np.eye(n, dtype=complex), h.copy())
    defl = config.schur_deflation * scale

    a, u = _hessenberg(h)
    max_sweeps = config.schur_sweep_factor * n * n
    hi = n - 1
    sweeps = 0
    while hi > 0:
        # deflate any negligible subdiagonal in the active window
        for i in range(hi, 0, -1):
            if abs(a[i, i - 1]) <= defl:
                a[i, i - 1] = 0.0
        while hi > 0 and a[hi, hi - 1] == 0.0:
            hi -= 1
        if hi == 0:
            break
        lo = hi
        while lo > 0 and a[lo, lo - 1] != 0.0:
            lo -= 1
        if sweeps >= max_sweeps:
            resid = np.linalg.norm(np.diag(a, -1))
            raise ConvergenceError(
                f"QR iteration did not converge in {max_sweeps} sweeps "
                f"(subdiagonal residual {resid:.3e})",
                residual=resid,
            )
        sweeps += 1
        mu = _wilkinson_shift(a[lo:hi + 1, lo:hi + 1])
        # explicit single-shift step on the active block: the rotation
        # sequence must triangularize (A - mu I), so track a shifted copy
        w = a[lo:hi + 1, lo:hi + 1] - mu * np.eye(hi - lo + 1)
        rots = []
        for i in range(hi - lo):
            g = _givens(w[i, i], w[i + 1, i])
            rots.append((lo + i, g))
            w[i:i + 2, i:] = g @ w[i:i + 2, i:]
        for i, g in rots:
            a[i:i + 2, lo:] = g @ a[i:i + 2, lo:]
        for i, g in rots:
            gh = g.conj().T
            a[:hi + 1, i:i + 2] = a[:hi + 1, i:i + 2] @ gh
            u[:, i:i + 2] = u[:, i:i + 2] @ gh

    a = np.triu(a)  # deflated subdiagonals are exact zeros
    sd = SchurDecomposition(u, a)
    sd.check(h, tol=tol)
    return sd


def eig_residual(h, lam: complex, v) -> float:
    """Relative residual ||H v - lam v|| / ||v|| of a claimed eigenpair."""
    h = as_square_matrix(h)
    v = as_vector(v)
    nv = np.linalg.norm(v)
    if nv == 0.0:
        raise ValidationError("residual undefined for the zero vector")
    return float(np.linalg.norm(h @ v - lam * v) / nv)


def complex_sqrt_principal(z: complex) -> complex:
    """Principal square root: Re >= 0, and Im >= 0 on the branch cut Re == 0."""
    w = np.sqrt(complex(z))
    if w.real < 0.0 or (w.real == 0.0 and w.imag < 0.0):
        w = -w
    return complex(w)
