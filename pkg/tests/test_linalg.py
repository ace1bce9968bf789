from __future__ import annotations

import numpy as np
import pytest

from momdil.errors import DimensionMismatch, NonHermitianInput, NotPSD
from momdil.linalg import (
    hermitian_eig,
    operator_norm,
    orthonormal_basis,
    psd_margin,
    psd_sqrt,
    symmetrize,
)


def _psd(rng, n, rank=None):
    X = rng.standard_normal((n, rank or n)) + 1j * rng.standard_normal((n, rank or n))
    return X @ X.conj().T


def test_eig_residual(rng):
    A = _psd(rng, 40)
    w, V = hermitian_eig(A)
    assert np.linalg.norm(A @ V - V * w) <= 1e-12 * np.abs(w).max()
    assert np.all(np.diff(w) >= 0)


def test_symmetrize_rejects_non_hermitian():
    with pytest.raises(NonHermitianInput):
        symmetrize(np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_symmetrize_rejects_rectangular():
    with pytest.raises(DimensionMismatch):
        symmetrize(np.ones((2, 3)))


def test_psd_margin_diagonal():
    lo, hi = psd_margin(np.diag([-0.5, 2.0, 3.0]))
    assert (lo, hi) == pytest.approx((-0.5, 3.0))


@pytest.mark.parametrize("n,rank", [(5, 5), (6, 2), (1, 1)])
def test_psd_sqrt_squares_back(rng, n, rank):
    A = _psd(rng, n, rank)
    R = psd_sqrt(A)
    assert np.allclose(R, R.conj().T)
    assert np.linalg.norm(R @ R - A) <= 1e-10 * np.linalg.norm(A)


def test_psd_sqrt_clamps_noise_but_rejects_negative():
    A = np.diag([1.0, -1e-15])
    assert np.allclose(psd_sqrt(A), np.diag([1.0, 0.0]))
    with pytest.raises(NotPSD):
        psd_sqrt(np.diag([1.0, -1e-3]))


def test_operator_norm_matches_svd(rng):
    X = rng.standard_normal((4, 9)) + 1j * rng.standard_normal((4, 9))
    assert operator_norm(X) == pytest.approx(np.linalg.norm(X, 2), rel=1e-12)


def test_orthonormal_basis_spans(rng):
    X = rng.standard_normal((7, 2)) @ rng.standard_normal((2, 5))
    Q = orthonormal_basis(X)
    assert Q.shape == (7, 2)
    assert np.allclose(Q.conj().T @ Q, np.eye(2))
    assert np.allclose(Q @ (Q.conj().T @ X), X)
