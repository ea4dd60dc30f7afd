import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from afsec.numerics import (NoPositiveBranchError, SingularPencilError, complex_to_real,
                            fix_phase, hermitian, hermitian_eig, is_psd, min_eigenvalue,
                            min_generalized_eig, principal_component, real_to_complex)

seeds = st.integers(0, 2**32 - 1)


def rand_herm(rng, n):
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (Z + Z.conj().T) / 2


def rand_pd(rng, n):
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return Z @ Z.conj().T + 0.1 * np.eye(n)


class TestHermitianEig:
    def test_diagonal(self):
        eig = hermitian_eig(np.diag([1.0, 3.0]))
        np.testing.assert_allclose(eig.eigenvalues, [3, 1])
        np.testing.assert_allclose(eig.eigenvectors, [[0, 1], [1, 0]])

    def test_pauli_y(self):
        eig = hermitian_eig(np.array([[0, -1j], [1j, 0]]))
        np.testing.assert_allclose(eig.eigenvalues, [1, -1], atol=1e-15)

    @settings(max_examples=40, deadline=None)
    @given(seeds, st.integers(1, 10))
    def test_reconstruction_and_orthonormality(self, seed, n):
        A = rand_herm(np.random.default_rng(seed), n)
        eig = hermitian_eig(A)
        nrm = np.linalg.norm(A, 2)
        assert np.linalg.norm(eig.reconstruct() - A, 2) < 1e-10 * nrm
        V = eig.eigenvectors
        np.testing.assert_allclose(V.conj().T @ V, np.eye(n), atol=1e-10)
        assert np.all(np.diff(eig.eigenvalues) <= 0)
        for j in range(n):
            assert np.linalg.norm(A @ V[:, j] - eig.eigenvalues[j] * V[:, j]) < 1e-10 * nrm

    def test_eigenvalues_are_real(self, rng):
        eig = hermitian_eig(rand_herm(rng, 6))
        assert np.isrealobj(eig.eigenvalues)

    def test_phase_convention(self, rng):
        V = hermitian_eig(rand_herm(rng, 5)).eigenvectors
        for j in range(5):
            k = np.argmax(np.abs(V[:, j]))
            assert V[k, j].imag == pytest.approx(0.0, abs=1e-15) and V[k, j].real > 0

    def test_deterministic(self, rng):
        A = rand_herm(rng, 6)
        a, b = hermitian_eig(A), hermitian_eig(A)
        assert a.eigenvectors.tobytes() == b.eigenvectors.tobytes()

    def test_non_finite(self):
        with pytest.raises(ValueError):
            hermitian_eig(np.array([[np.inf, 0], [0, 1]]))

    def test_symmetrizes_input(self):
        H = hermitian(np.array([[1, 2], [0, 1]]))
        np.testing.assert_allclose(H, [[1, 1], [1, 1]])


class TestPrincipal:
    def test_diagonal(self):
        lam, v = principal_component(np.diag([2.0, 5.0]))
        assert lam == pytest.approx(5.0)
        np.testing.assert_allclose(v, [0, 1])

    def test_rank_one(self):
        w = np.array([1 + 1j, 2, -1j])
        lam, v = principal_component(np.outer(w, w.conj()))
        assert lam == pytest.approx(np.vdot(w, w).real)
        assert abs(abs(np.vdot(v, w)) - np.linalg.norm(w)) < 1e-12

    def test_matches_full_spectrum(self, rng):
        A = rand_pd(rng, 5)
        assert principal_component(A)[0] == pytest.approx(hermitian_eig(A).eigenvalues[0])

    def test_fix_phase_ties_first(self):
        v = fix_phase(np.array([1j, -1j]))
        np.testing.assert_allclose(v, [1, -1])


class TestGeneralized:
    def test_diagonal(self):
        lam, v = min_generalized_eig(np.diag([2.0, 5.0]), np.diag([1.0, 0.5]))
        assert lam == pytest.approx(2.0)

    def test_identity(self):
        assert min_generalized_eig(np.eye(3), np.eye(3))[0] == pytest.approx(1.0)

    @settings(max_examples=40, deadline=None)
    @given(seeds)
    def test_residual_pd_pair(self, seed):
        rng = np.random.default_rng(seed)
        A, B = rand_pd(rng, 4), rand_pd(rng, 4)
        lam, v = min_generalized_eig(A, B)
        assert np.linalg.norm(A @ v - lam * B @ v) < 1e-9 * max(1.0, np.linalg.norm(A @ v))
        ref = np.min(np.linalg.eigvals(np.linalg.solve(B, A)).real)
        assert lam == pytest.approx(ref, rel=1e-9)

    @settings(max_examples=40, deadline=None)
    @given(seeds)
    def test_rayleigh_probe_lower_bound(self, seed):
        rng = np.random.default_rng(seed)
        A, B = rand_pd(rng, 4), rand_herm(rng, 4)
        try:
            lam, v = min_generalized_eig(A, B)
        except NoPositiveBranchError:
            return
        assert np.real(v.conj() @ B @ v) == pytest.approx(1.0)
        X = rng.standard_normal((500, 4)) + 1j * rng.standard_normal((500, 4))
        qa = np.einsum("ij,jk,ik->i", X.conj(), A, X).real
        qb = np.einsum("ij,jk,ik->i", X.conj(), B, X).real
        pos = qb > 0
        assert np.all(qa[pos] / qb[pos] >= lam - 1e-9)

    def test_singular(self):
        with pytest.raises(SingularPencilError):
            min_generalized_eig(np.eye(2), np.diag([1.0, 0.0]))

    def test_no_positive_branch(self):
        with pytest.raises(NoPositiveBranchError):
            min_generalized_eig(np.eye(2), -np.eye(2))

    def test_indefinite_picks_positive_branch(self):
        lam, v = min_generalized_eig(np.diag([1.0, 1.0]), np.diag([-1.0, 0.25]))
        assert lam == pytest.approx(4.0)


class TestPSD:
    def test_examples(self):
        assert is_psd(np.eye(3))
        assert not is_psd(np.diag([1.0, -1.0]))
        w = np.array([1, 1j, 2])
        assert is_psd(np.outer(w, w.conj()))

    def test_min_eigenvalue(self):
        assert min_eigenvalue(np.diag([3.0, -2.0])) == pytest.approx(-2.0)


class TestEmbedding:
    def test_real_symmetric(self):
        A = np.array([[2.0, 1.0], [1.0, 3.0]])
        np.testing.assert_array_equal(complex_to_real(A), np.block([[A, 0 * A], [0 * A, A]]))

    def test_pauli_doubling(self):
        w = np.linalg.eigvalsh(complex_to_real(np.array([[0, -1j], [1j, 0]])))
        np.testing.assert_allclose(w, [-1, -1, 1, 1], atol=1e-15)

    @settings(max_examples=40, deadline=None)
    @given(seeds, st.integers(1, 6))
    def test_identities(self, seed, n):
        A = rand_herm(np.random.default_rng(seed), n)
        Y = complex_to_real(A)
        np.testing.assert_allclose(Y, Y.T)
        assert np.trace(Y) == pytest.approx(2 * np.trace(A).real)
        assert np.linalg.norm(Y) == pytest.approx(np.sqrt(2) * np.linalg.norm(A))
        np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(Y)),
                                   np.sort(np.repeat(np.linalg.eigvalsh(A), 2)), atol=1e-10)
        np.testing.assert_allclose(real_to_complex(Y), A, atol=1e-15)

    def test_psd_iff_embedding_psd(self, rng):
        for trial in range(100):
            n = 1 + trial % 6
            A = rand_herm(rng, n)
            if trial % 2:
                A = A @ A.conj().T
            assert is_psd(A) == is_psd(complex_to_real(A))
