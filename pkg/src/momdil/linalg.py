"""Dense complex-matrix primitives with explicit tolerance contracts.

Every matrix is a 2-D ``numpy`` array of dtype ``complex128``.  Hermitian
routines always symmetrize their input as ``(M + M^*)/2`` first, since
kernel assembly leaves rounding-level asymmetry behind.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, NonHermitianInput, NotPSD

DEFAULT_HERMITICITY_TOL = 1e-10
DEFAULT_CLAMP_TOL = 1e-12


def as_matrix(M) -> np.ndarray:
    """Coerce to a finite 2-D complex128 array."""
    A = np.asarray(M, dtype=np.complex128)
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    if A.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def adjoint(M: np.ndarray) -> np.ndarray:
    return M.conj().T


def _square(M) -> np.ndarray:
    A = as_matrix(M)
    if A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {A.shape}")
    return A


def symmetrize(M, hermiticity_tol: float = DEFAULT_HERMITICITY_TOL) -> np.ndarray:
    A = _square(M)
    fro = np.linalg.norm(A)
    skew = np.linalg.norm(A - adjoint(A))
    if skew > hermiticity_tol * max(1.0, fro):
        raise NonHermitianInput(
            f"||M - M*||_F = {skew:.3e} exceeds {hermiticity_tol:.1e} * max(1, ||M||_F)"
        )
    return 0.5 * (A + adjoint(A))


def hermitian_eig(M, hermiticity_tol: float = DEFAULT_HERMITICITY_TOL):
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(w, V)`` with ``w`` ascending and the columns of ``V``
    orthonormal, ``M V = V diag(w)``.
    """
    H = symmetrize(M, hermiticity_tol)
    if H.shape[0] == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=np.complex128)
    w, V = np.linalg.eigh(H)
    return w, V


def psd_margin(M, hermiticity_tol: float = DEFAULT_HERMITICITY_TOL) -> tuple[float, float]:
    """Smallest and largest eigenvalue of a Hermitian matrix."""
    H = symmetrize(M, hermiticity_tol)
    if H.shape[0] == 0:
        return 0.0, 0.0
    w = np.linalg.eigvalsh(H)
    return float(w[0]), float(w[-1])


def is_psd(lambda_min: float, lambda_max: float, tol: float) -> bool:
    return lambda_min >= -tol * max(1.0, lambda_max)


def psd_sqrt(M, clamp_tol: float = DEFAULT_CLAMP_TOL,
             hermiticity_tol: float = DEFAULT_HERMITICITY_TOL) -> np.ndarray:
    """Hermitian PSD square root.

    Eigenvalues in ``[-clamp_tol * lambda_max, 0)`` are treated as rounding
    noise and clamped to zero; anything more negative raises ``NotPSD``.
    """
    w, V = hermitian_eig(M, hermiticity_tol)
    if w.size == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    lam_max = max(float(w[-1]), 0.0)
    if w[0] < -clamp_tol * lam_max or (lam_max == 0.0 and w[0] < 0.0):
        raise NotPSD(f"eigenvalue {w[0]:.3e} below clamp band -{clamp_tol:.1e} * {lam_max:.3e}")
    root = np.sqrt(np.clip(w, 0.0, None))
    R = (V * root) @ adjoint(V)
    return 0.5 * (R + adjoint(R))


def operator_norm(M) -> float:
    """Largest singular value, as sqrt(lambda_max(M^* M))."""
    A = as_matrix(M)
    if A.size == 0:
        return 0.0
    # Gram on the smaller side; same nonzero spectrum either way.
    gram = adjoint(A) @ A if A.shape[1] <= A.shape[0] else A @ adjoint(A)
    _, lam_max = psd_margin(gram, hermiticity_tol=1e-8)
    return float(np.sqrt(max(lam_max, 0.0)))


def orthonormal_basis(X: np.ndarray, rel_tol: float = 1e-12) -> np.ndarray:
    """Orthonormal basis of the column space of ``X`` (SVD rank cut)."""
    if X.size == 0:
        return np.zeros((X.shape[0], 0), dtype=np.complex128)
    U, s, _ = np.linalg.svd(X, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((X.shape[0], 0), dtype=np.complex128)
    keep = s > rel_tol * s[0]
    return U[:, keep]
