"""Hermitian linear algebra kernels.

Everything here works on small dense complex matrices (a few dozen rows at
most). Eigendecompositions are delegated to LAPACK through numpy/scipy; the
functions in this module add the conventions the rest of the package relies
on: descending eigenvalue order, a deterministic eigenvector phase, and the
sign analysis needed for indefinite pencils.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg


class SingularPencilError(np.linalg.LinAlgError):
    """Raised when the right-hand matrix of a pencil is numerically singular."""


class NoPositiveBranchError(ValueError):
    """Raised when a pencil has no eigenvector with ``v^H B v > 0``."""


def hermitian(A) -> np.ndarray:
    """Return ``(A + A^H) / 2`` as a complex array, checking for finiteness."""
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return (A + A.conj().T) / 2


def fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate ``v`` so its largest-magnitude entry is real and positive.

    Ties are broken by the first occurrence.
    """
    v = np.asarray(v, dtype=complex)
    if v.size == 0:
        return v
    j = int(np.argmax(np.abs(v)))
    if v[j] == 0:
        return v
    return v * (np.abs(v[j]) / v[j])


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues (descending) and orthonormal eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.conj().T


def hermitian_eig(A) -> EigenDecomposition:
    """Full eigendecomposition of a Hermitian matrix.

    Eigenvalues are sorted in descending order (stable, so equal values keep
    LAPACK's order) and each eigenvector has its largest entry made real
    positive.
    """
    H = hermitian(A)
    w, V = np.linalg.eigh(H)
    order = np.argsort(-w, kind="stable")
    w = w[order]
    V = V[:, order]
    V = np.column_stack([fix_phase(V[:, j]) for j in range(V.shape[1])]) if V.size else V
    return EigenDecomposition(eigenvalues=w, eigenvectors=V)


def principal_component(A) -> tuple[float, np.ndarray]:
    """Largest eigenvalue and its unit-norm eigenvector."""
    eig = hermitian_eig(A)
    return float(eig.eigenvalues[0]), eig.eigenvectors[:, 0]


def min_eigenvalue(A) -> float:
    return float(np.linalg.eigvalsh(hermitian(A))[0])


def is_psd(A, tol: float = 1e-9) -> bool:
    """True iff ``lambda_min(A) >= -tol * max(1, ||A||_2)``."""
    H = hermitian(A)
    w = np.linalg.eigvalsh(H)
    scale = max(1.0, float(np.max(np.abs(w)))) if w.size else 1.0
    return bool(w[0] >= -tol * scale) if w.size else True


def min_generalized_eig(A, B, singular_tol: float = 1e-12) -> tuple[float, np.ndarray]:
    """Smallest positive-branch eigenvalue of ``B^{-1} A``.

    ``A`` must be positive definite; ``B`` may be indefinite. Only
    eigenvectors with ``v^H B v > 0`` are considered, so the returned value
    minimizes the Rayleigh quotient ``v^H A v / v^H B v`` over that region.

    With ``A = L L^H`` the pencil reduces to the Hermitian matrix
    ``G = L^{-1} B L^{-H}``; eigenvalues of ``B^{-1} A`` are reciprocals of
    those of ``G`` and the positive branch minimum is ``1 / lambda_max(G)``.

    Returns
    -------
    lam : float
        The eigenvalue.
    v : ndarray
        Eigenvector normalized so that ``v^H B v = 1``, phase fixed.

    Raises
    ------
    SingularPencilError
        If ``B`` is singular relative to its norm.
    NoPositiveBranchError
        If ``B`` has no positive direction relative to ``A``.
    """
    A = hermitian(A)
    B = hermitian(B)
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch {A.shape} vs {B.shape}")
    wB = np.linalg.eigvalsh(B)
    normB = float(np.max(np.abs(wB))) if wB.size else 0.0
    if normB == 0.0 or float(np.min(np.abs(wB))) <= singular_tol * normB:
        raise SingularPencilError("right-hand matrix of the pencil is singular")
    L = np.linalg.cholesky(A)
    G = scipy.linalg.solve_triangular(L, B, lower=True)
    G = scipy.linalg.solve_triangular(L, G.conj().T, lower=True).conj().T
    eig = hermitian_eig(G)
    mu, W = eig.eigenvalues, eig.eigenvectors
    if mu[0] <= 0:
        raise NoPositiveBranchError("no eigenvector with positive B-curvature")
    v = scipy.linalg.solve_triangular(L.conj().T, W[:, 0], lower=False)
    v = fix_phase(v)
    v = v / np.sqrt(np.real(v.conj() @ B @ v))
    return float(1.0 / mu[0]), v


def complex_to_real(A) -> np.ndarray:
    """Real symmetric embedding ``[[Re A, -Im A], [Im A, Re A]]``."""
    H = hermitian(A)
    R, I = H.real, H.imag
    return np.block([[R, -I], [I, R]])


def real_to_complex(Y) -> np.ndarray:
    """Project a real ``2n x 2n`` symmetric matrix back to ``n x n`` Hermitian.

    Inverse of :func:`complex_to_real` on its range; on a general symmetric
    matrix it returns the Hermitian matrix whose embedding is the nearest
    structured matrix.
    """
    Y = np.asarray(Y, dtype=float)
    n = Y.shape[0] // 2
    Y11, Y12 = Y[:n, :n], Y[:n, n:]
    Y21, Y22 = Y[n:, :n], Y[n:, n:]
    return hermitian((Y11 + Y22) / 2 + 1j * (Y21 - Y12) / 2)
