import numpy as np
import pytest

from schurdyn.config import DEFAULT
from schurdyn.errors import ConvergenceError, ValidationError
from schurdyn.linalg import (
    complex_sqrt_principal,
    eig_residual,
    schur_decompose,
)


def char_poly_roots(h):
    """Eigenvalues via Faddeev-LeVerrier coefficients and a root finder."""
    n = h.shape[0]
    coeffs = np.zeros(n + 1, dtype=complex)
    coeffs[0] = 1.0
    m = np.zeros_like(h)
    for k in range(1, n + 1):
        m = h @ m + coeffs[k - 1] * np.eye(n)
        coeffs[k] = -np.trace(h @ m) / k
    return np.roots(coeffs)


def model_matrix_s0(c=2.0):
    w = 1.0 - 1j * c
    return np.array([[w, c], [c, -w]], dtype=complex)


class TestSchurDecompose:
    def test_triangular_input_is_fixed_point(self):
        h = np.array([[1.0, 2.0], [0.0, 3.0]], dtype=complex)
        sd = schur_decompose(h)
        assert np.allclose(np.abs(sd.unitary), np.eye(2), atol=1e-12)
        assert np.allclose(sd.unitary.conj().T @ h @ sd.unitary, sd.triangular, atol=1e-12)

    def test_normal_matrix_diagonalizes(self):
        sd = schur_decompose(np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex))
        assert abs(sd.triangular[0, 1]) < 1e-12
        assert sorted(np.round(sd.eigenvalues.real, 10)) == [-1.0, 1.0]

    def test_loop_model_matches_quadratic_formula(self):
        sd = schur_decompose(model_matrix_s0())
        expected = complex_sqrt_principal(1.0 - 4j)  # roots are +/- sqrt(c^2 + w^2)
        got = sorted(sd.eigenvalues, key=lambda z: z.real)
        assert abs(got[0] + expected) < 1e-10
        assert abs(got[1] - expected) < 1e-10
        assert abs(expected - (1.600485180440241 - 1.2496210676876531j)) < 1e-12

    def test_invariants_on_random_matrices(self, rng):
        for _ in range(200):
            n = int(rng.integers(2, 9))
            h = rng.uniform(-1, 1, (n, n)) + 1j * rng.uniform(-1, 1, (n, n))
            sd = schur_decompose(h)
            assert np.linalg.norm(sd.unitary.conj().T @ sd.unitary - np.eye(n)) < 1e-10
            assert np.abs(np.tril(sd.triangular, -1)).max() <= 1e-10 * np.linalg.norm(h)
            assert np.linalg.norm(sd.reconstruct() - h) < 1e-10 * max(np.linalg.norm(h), 1.0)
            assert np.allclose(sd.eigenvalues, np.diag(sd.triangular))

    def test_eigenvalues_match_char_poly_roots(self, rng):
        for _ in range(50):
            n = int(rng.integers(2, 7))
            h = rng.uniform(-1, 1, (n, n)) + 1j * rng.uniform(-1, 1, (n, n))
            got = np.sort_complex(schur_decompose(h).eigenvalues)
            want = np.sort_complex(char_poly_roots(h))
            assert np.abs(got - want).max() < 1e-8

    def test_rejects_bad_input(self):
        with pytest.raises(ValidationError):
            schur_decompose(np.ones((2, 3)))
        with pytest.raises(ValidationError):
            schur_decompose(np.array([[np.inf, 0], [0, 1]], dtype=complex))

    def test_nonconvergence_carries_residual(self):
        config = DEFAULT.with_overrides(schur_sweep_factor=0)
        h = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
        with pytest.raises(ConvergenceError) as err:
            schur_decompose(h, config=config)
        assert err.value.residual is not None


class TestEigResidual:
    def test_identity(self):
        assert eig_residual(np.eye(3), 1.0, np.array([1, 0, 0])) < 1e-15

    def test_swap_matrix(self):
        v = np.array([1.0, 1.0]) / np.sqrt(2.0)
        h = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
        assert eig_residual(h, 1.0, v) < 1e-15

    def test_first_schur_column_of_loop_model(self):
        h = model_matrix_s0()
        from schurdyn.orderings import growth_order

        ordered = growth_order(schur_decompose(h))
        lam1 = ordered.eigenvalues[0]
        assert eig_residual(h, lam1, ordered.unitary[:, 0].copy()) < 1e-10

    def test_zero_vector_rejected(self):
        with pytest.raises(ValidationError):
            eig_residual(np.eye(2), 1.0, np.zeros(2))


class TestComplexSqrt:
    def test_examples(self):
        assert complex_sqrt_principal(4.0) == 2.0
        assert complex_sqrt_principal(0.0) == 0.0
        got = complex_sqrt_principal(1.0 - 4j)
        assert abs(got**2 - (1.0 - 4j)) < 1e-12

    def test_square_recovers_input(self, rng):
        zs = rng.uniform(-10, 10, 1000) + 1j * rng.uniform(-10, 10, 1000)
        for z in zs:
            w = complex_sqrt_principal(z)
            assert abs(w * w - z) <= 1e-12 * max(abs(z), 1.0)
            assert w.real > 0 or (w.real == 0 and w.imag >= 0) or abs(w) == 0

    def test_branch_cut_convention(self):
        # on the cut Re(w) = 0 the root with Im >= 0 is returned
        assert complex_sqrt_principal(-4.0) == 2j
        assert complex_sqrt_principal(complex(-1.0, 0.0)) == 1j
        assert complex_sqrt_principal(complex(-1.0, -0.0)) == 1j
