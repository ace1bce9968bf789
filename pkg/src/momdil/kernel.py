"""Moment kernels as word-indexed block Gram matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ensemble import OperatorEnsemble, matrix_to_json
from .errors import InsufficientDepth
from .linalg import adjoint, hermitian_eig, psd_margin
from .words import WordTable, enumerate_words, Word

DEFAULT_PD_TOL = 1e-10


@dataclass(frozen=True)
class BlockKernel:
    """Block matrix ``G`` with ``G[alpha, beta] = K(alpha, beta)`` in table order."""

    table: WordTable
    n: int
    G: np.ndarray

    @property
    def d(self) -> int:
        return self.table.d

    @property
    def N(self) -> int:
        return self.table.N

    def block_slice(self, w: Word) -> slice:
        k = self.table.position(w)
        return slice(k * self.n, (k + 1) * self.n)

    def block(self, alpha: Word, beta: Word) -> np.ndarray:
        return self.G[self.block_slice(alpha), self.block_slice(beta)]

    def restrict(self, N: int) -> "BlockKernel":
        """Leading principal block submatrix on words of length <= N."""
        if N > self.N:
            raise InsufficientDepth(f"cannot restrict depth {self.N} kernel to {N}")
        size = self.table.level_size(N) * self.n
        return BlockKernel(enumerate_words(self.d, N), self.n, self.G[:size, :size].copy())

    def to_json(self) -> dict:
        return {
            "kind": "block_kernel",
            "d": self.d,
            "n": self.n,
            "N": self.N,
            "words": [w.render() for w in self.table],
            "matrix": matrix_to_json(self.G),
        }


def word_stack(ops, table: WordTable, n: int) -> np.ndarray:
    """Stack ``[A^w]`` for every table word into an (m*n) x n matrix.

    Uses ``A^{alpha i} = A^alpha A_i`` so each product costs one multiply.
    """
    m = len(table)
    X = np.empty((m * n, n), dtype=np.complex128)
    X[:n] = np.eye(n)
    for k in range(1, m):
        w = table[k]
        p = table.parent_index(k)
        X[k * n:(k + 1) * n] = X[p * n:(p + 1) * n] @ ops[w.letters[-1] - 1]
    return X


def assemble_kernel(E: OperatorEnsemble, N: int, table: WordTable | None = None) -> BlockKernel:
    table = table if table is not None else enumerate_words(E.d, N)
    m = len(table)
    G = np.zeros((m * E.n, m * E.n), dtype=np.complex128)
    for sc in E.scenarios:
        X = word_stack(sc.ops, table, E.n)
        G += sc.weight * (X @ adjoint(X))
    return BlockKernel(table, E.n, G)


def assemble_sigma(K: BlockKernel) -> BlockKernel:
    """``K_Sigma(alpha, beta) = sum_i K(alpha i, beta i)`` on words of length <= N-1."""
    if K.N < 1:
        raise InsufficientDepth("shifted kernel needs depth N >= 1")
    low = enumerate_words(K.d, K.N - 1)
    n, m = K.n, len(low)
    out = np.zeros((m * n, m * n), dtype=np.complex128)
    for i in range(1, K.d + 1):
        idx = np.array([K.table.position(w + Word((i,), K.d)) for w in low])
        cols = (idx[:, None] * n + np.arange(n)[None, :]).ravel()
        out += K.G[np.ix_(cols, cols)]
    return BlockKernel(low, n, out)


@dataclass(frozen=True)
class PdResult:
    verdict: str
    margin: float
    lambda_max: float
    tol: float

    @property
    def ok(self) -> bool:
        return self.verdict in ("PSD", "Dominated")

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "margin": self.margin,
                "lambda_max": self.lambda_max, "tol": self.tol}


@dataclass(frozen=True)
class DominationResult(PdResult):
    depth: int = 0
    witness: tuple = ()

    def to_json(self) -> dict:
        out = super().to_json()
        out["depth"] = self.depth
        if self.witness:
            out["witness"] = list(self.witness)
        return out


def pd_check(K: BlockKernel, tol: float = DEFAULT_PD_TOL) -> PdResult:
    lam_min, lam_max = psd_margin(K.G)
    verdict = "PSD" if lam_min >= -tol * max(1.0, lam_max) else "NotPSD"
    return PdResult(verdict, lam_min, lam_max, tol)


def domination_matrix(K: BlockKernel) -> tuple[BlockKernel, np.ndarray]:
    """Return ``(K restricted to W_{N-1}, K|_{N-1} - K_Sigma)``."""
    sigma = assemble_sigma(K)
    low = K.restrict(K.N - 1)
    return low, low.G - sigma.G


def pd_order_check(K: BlockKernel, tol: float = DEFAULT_PD_TOL,
                   witness_tol: float = 1e-8) -> DominationResult:
    """Decide ``K_Sigma <= K`` on words of length <= N-1."""
    low, D = domination_matrix(K)
    w, V = hermitian_eig(D)
    _, scale = psd_margin(low.G)
    margin = float(w[0])
    dominated = margin >= -tol * max(1.0, scale)
    witness = ()
    if not dominated:
        witness = decode_vector(V[:, 0], low.table, low.n, witness_tol)
    return DominationResult("Dominated" if dominated else "NotDominated", margin, float(scale),
                            tol, K.N - 1, witness)


def decode_vector(v: np.ndarray, table: WordTable, n: int, cutoff: float = 1e-8) -> tuple:
    """Split a block vector into (word, vector) pairs, dropping negligible blocks."""
    out = []
    for k, w in enumerate(table):
        block = v[k * n:(k + 1) * n]
        if np.linalg.norm(block) > cutoff:
            out.append({"word": w.render(),
                        "vector": [[float(z.real), float(z.imag)] for z in block]})
    return tuple(out)
