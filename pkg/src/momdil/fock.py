"""Truncated full Fock space over the free semigroup.

Basis vectors ``e_gamma`` are indexed by words in graded lexicographic order.
The left creation operator ``L_i`` sends ``e_gamma`` to ``e_{i gamma}`` and
annihilates the top truncation level.

Norms of ``p(L)`` are certified from below: ``fock_norm`` uses the exact map
from levels <= M into levels <= M + deg p, which loses nothing on its domain,
so its value increases with M towards ``||p(L)||``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import AlphabetMismatch, CapacityExceeded, OutOfRange
from .linalg import adjoint, psd_margin
from .ncpoly import NcPoly, apply_poly, coeff_l2_norm
from .words import DEFAULT_CAPACITY, WordTable, Word, count_words, enumerate_words, word_offset

DENSE_LIMIT = 1500


@dataclass(frozen=True)
class TruncatedFock:
    d: int
    M: int
    basis: WordTable
    L: tuple[np.ndarray, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def vacuum(self) -> np.ndarray:
        e = np.zeros(self.dim, dtype=np.complex128)
        e[0] = 1.0
        return e


def build_fock(d: int, M: int, capacity: int = DEFAULT_CAPACITY) -> TruncatedFock:
    basis = enumerate_words(d, M, capacity)
    dim = len(basis)
    L = []
    for i in range(1, d + 1):
        Li = np.zeros((dim, dim), dtype=np.complex128)
        letter = Word((i,), d)
        for k, w in enumerate(basis):
            if len(w) < M:
                Li[basis.position(letter + w), k] = 1.0
        L.append(Li)
    return TruncatedFock(d, M, basis, tuple(L))


def eval_on_fock(p: NcPoly, fock: TruncatedFock, side: str = "direct") -> np.ndarray:
    """``p(L)`` on the square truncated space (top levels are lost)."""
    if p.d != fock.d:
        raise AlphabetMismatch(f"polynomial in {p.d} variables, Fock space over {fock.d}")
    return apply_poly(p, fock.L, np.eye(fock.dim, dtype=np.complex128), side)


def _positions(d: int, length: int) -> np.ndarray:
    """Base-d values of all words of the given length, in graded order."""
    return np.arange(d ** length, dtype=np.int64)


def creation_map(p: NcPoly, M: int, capacity: int = DEFAULT_CAPACITY) -> sp.csr_matrix:
    """Sparse matrix of ``xi -> p(L) xi`` from levels <= M into levels <= M + deg p.

    Word positions are computed arithmetically: the graded index of
    ``alpha gamma`` is ``offset(|alpha|+|gamma|) + val(alpha) d^|gamma| + val(gamma)``.
    """
    if M < 0:
        raise OutOfRange(f"truncation level must be >= 0, got {M}")
    d = p.d
    n_dom = count_words(d, M)
    if n_dom > capacity:
        raise CapacityExceeded(f"Fock domain of dimension {n_dom} exceeds capacity {capacity}")
    deg = p.degree
    n_cod = count_words(d, M + deg)
    rows, cols, vals = [], [], []
    for alpha, c in p.coeffs.items():
        a_val = 0
        for i in alpha.letters:
            a_val = a_val * d + (i - 1)
        for g_len in range(M + 1):
            g_vals = _positions(d, g_len)
            dom = word_offset(d, g_len) + g_vals
            cod = word_offset(d, len(alpha) + g_len) + a_val * d ** g_len + g_vals
            rows.append(cod)
            cols.append(dom)
            vals.append(np.full(g_vals.size, c, dtype=np.complex128))
    if not rows:
        return sp.csr_matrix((n_cod, n_dom), dtype=np.complex128)
    T = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(n_cod, n_dom))
    return T.tocsr()


def _sigma_max(T: sp.csr_matrix) -> float:
    gram = (T.conj().T @ T).tocsr()
    n = gram.shape[0]
    if n <= DENSE_LIMIT:
        _, lam = psd_margin(gram.toarray())
    else:
        v0 = np.ones(n, dtype=np.complex128)
        lam = float(spla.eigsh(gram, k=1, which="LA", tol=0, v0=v0,
                               return_eigenvectors=False)[0])
    return float(np.sqrt(max(lam, 0.0)))


@dataclass(frozen=True)
class FockNorm:
    value: float
    lower_bound: float
    M: int


def fock_norm(p: NcPoly, M: int, capacity: int = DEFAULT_CAPACITY) -> FockNorm:
    """Certified lower bound for ``||p(L)||`` from levels <= M.

    ``lower_bound`` is the coefficient l2 norm ``||p(L) e_empty||``.
    """
    value = _sigma_max(creation_map(p, M, capacity))
    return FockNorm(value, coeff_l2_norm(p), M)


def default_level(p: NcPoly) -> int:
    return p.degree + 6


def convergence_table(p: NcPoly, levels: int = 6, start: int | None = None,
                      capacity: int = DEFAULT_CAPACITY) -> list[dict]:
    """Rows ``{M, value, gap, lower_bound}`` for M = start .. start + levels."""
    start = p.degree if start is None else start
    rows = []
    prev = None
    for M in range(start, start + levels + 1):
        try:
            fn = fock_norm(p, M, capacity)
        except CapacityExceeded:
            break
        gap = None if prev is None else fn.value - prev
        rows.append({"M": M, "value": fn.value, "gap": gap, "lower_bound": fn.lower_bound})
        prev = fn.value
    return rows
