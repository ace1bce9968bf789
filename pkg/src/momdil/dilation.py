"""Truncated isometric dilation of the GNS shift tuple.

With ``T_i = B_i^*`` (a row contraction) and the defect
``Delta = (I - T^* T)^{1/2}`` on ``H'^{(+)d}``, the dilation space is

    KK = H' (+) (F_{<=M} (x) D),          D = range(Delta)

and ``S_i(h (+) sum_g e_g (x) xi_g) = T_i h (+) (e_empty (x) Delta iota_i h
+ sum_{|g|<M} e_{ig} (x) xi_g)``.  The embedded ``H'`` is co-invariant:
``S_i^*`` maps it to itself and acts there as ``B_i``.  Coordinates are the
``r`` coordinates of ``H'`` followed by one ``delta``-block per Fock word.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import CapacityExceeded, DepthExceeded, NotContractive
from .gns import GnsModel, column_contraction_check, shift_products
from .kernel import BlockKernel, assemble_sigma
from .linalg import adjoint, hermitian_eig, orthonormal_basis, psd_margin, psd_sqrt
from .ncpoly import NcPoly, apply_poly
from .words import DEFAULT_CAPACITY, Word, WordTable, enumerate_words

CONTRACTIVE_TOL = 1e-10
DEFECT_RANK_TOL = 1e-12
MAX_DILATION_DIM = 20_000


@dataclass
class DilationModel:
    gns: GnsModel
    M_fock: int
    fock: WordTable
    defect_basis: np.ndarray      # dr x delta, orthonormal basis of D
    defect: np.ndarray            # Delta, dr x dr
    S: list[sp.csr_matrix]
    W: np.ndarray                 # dimK x n
    P: sp.csr_matrix

    @property
    def r(self) -> int:
        return self.gns.r

    @property
    def d(self) -> int:
        return self.gns.d

    @property
    def n(self) -> int:
        return self.gns.n

    @property
    def defect_dim(self) -> int:
        return self.defect_basis.shape[1]

    @property
    def dimK(self) -> int:
        return self.r + len(self.fock) * self.defect_dim

    @property
    def J(self) -> sp.csr_matrix:
        """Isometric embedding of H' as the first summand."""
        return sp.eye(self.dimK, self.r, dtype=np.complex128, format="csr")

    def P_sqrt(self) -> sp.csr_matrix:
        """``P^{1/2}``, computed as ``J (J^* P J)^{1/2} J^*`` since P lives on JH'."""
        J = self.J
        inner = (J.T @ self.P @ J).toarray()
        root = sp.csr_matrix(psd_sqrt(inner))
        return (J @ root @ J.T).tocsr()

    def low_projection(self) -> sp.csr_matrix:
        """Projection onto H' (+) (F_{<=M-1} (x) D), where the S_i are exact isometries."""
        low = self.r + self.fock.level_size(self.M_fock - 1) * self.defect_dim
        if self.M_fock == 0:
            low = self.r
        diag = np.zeros(self.dimK)
        diag[:low] = 1.0
        return sp.diags(diag.astype(np.complex128), format="csr")

    def adjoint_words(self, table: WordTable, X: np.ndarray | None = None) -> dict:
        """``{word: (S^word)^* X}`` for every table word (X defaults to W)."""
        X = self.W if X is None else X
        Sh = [s.conj().T.tocsr() for s in self.S]
        out = {(): X}
        for w in table:
            if w.letters:
                out[w.letters] = Sh[w.letters[-1] - 1] @ out[w.letters[:-1]]
        return out

    def summary(self) -> dict:
        return {"r": self.r, "M_fock": self.M_fock, "defect_dim": self.defect_dim,
                "dimK": self.dimK}


def build_dilation(gns: GnsModel, M_fock: int, capacity: int = MAX_DILATION_DIM) -> DilationModel:
    if not gns.B:
        raise ValueError("GNS model has no shift operators; run build_shifts first")
    contraction = column_contraction_check(gns)
    r, d = gns.r, gns.d
    T = [adjoint(b) for b in gns.B]
    row = np.hstack(T) if r else np.zeros((0, 0), dtype=np.complex128)
    X = np.eye(d * r, dtype=np.complex128) - adjoint(row) @ row
    mu, U = hermitian_eig(X)
    if mu.size and mu[0] < -CONTRACTIVE_TOL:
        raise NotContractive(
            f"I - T^*T has eigenvalue {mu[0]:.3e} (lambda_max(sum B_i^*B_i) = {contraction.lambda_max:.6g})"
        )
    mu_max = float(mu[-1]) if mu.size else 0.0
    # X <= I, so the natural scale is 1; pure rounding noise yields no defect.
    keep = mu > DEFECT_RANK_TOL * max(mu_max, 1.0)
    E = U[:, keep]
    if mu_max > 0:
        # absolute clamp band CONTRACTIVE_TOL, matching the check above
        Delta = psd_sqrt(X, clamp_tol=CONTRACTIVE_TOL / mu_max)
    else:
        Delta = np.zeros_like(X)
    delta = E.shape[1]

    fock = enumerate_words(d, M_fock, DEFAULT_CAPACITY)
    dimK = r + len(fock) * delta
    if dimK > capacity:
        raise CapacityExceeded(f"dilation space of dimension {dimK} exceeds {capacity}")

    ED = adjoint(E) @ Delta   # delta x dr, coordinates of Pi_D Delta
    S = []
    for i in range(1, d + 1):
        rows, cols, vals = [], [], []

        def put(block, r0, c0):
            rr, cc = np.nonzero(block)
            rows.append(rr + r0)
            cols.append(cc + c0)
            vals.append(block[rr, cc])

        put(T[i - 1], 0, 0)
        if delta:
            put(ED[:, (i - 1) * r:i * r], r, 0)
            letter = Word((i,), d)
            src = np.array([k for k, g in enumerate(fock) if len(g) < M_fock], dtype=np.int64)
            tgt = np.array([fock.position(letter + fock[k]) for k in src], dtype=np.int64)
            offs = np.arange(delta)
            rows.append((r + tgt[:, None] * delta + offs).ravel())
            cols.append((r + src[:, None] * delta + offs).ravel())
            vals.append(np.ones(src.size * delta, dtype=np.complex128))
        S.append(sp.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(dimK, dimK), dtype=np.complex128))
    Pdiag = np.zeros(dimK, dtype=np.complex128)
    Pdiag[:r] = 1.0
    P = sp.diags(Pdiag, format="csr")
    W = np.zeros((dimK, gns.n), dtype=np.complex128)
    W[:r] = gns.V(Word.empty(d))
    return DilationModel(gns, M_fock, fock, E, Delta, S, W, P)


def coinvariance_residual(model: DilationModel) -> dict:
    """``max_i ||(I-P) S_i^* P||`` and ``max_i ||J^* S_i^* J - B_i||``."""
    J = model.J
    leak = comp = 0.0
    for s, b in zip(model.S, model.gns.B):
        Sh = s.conj().T
        tail = (Sh @ J).toarray()[model.r:]
        leak = max(leak, float(np.linalg.norm(tail, 2)) if tail.size else 0.0)
        comp = max(comp, float(np.linalg.norm((J.T @ Sh @ J).toarray() - b, 2)))
    return {"coinvariance": leak, "compression": comp}


def compression_identity_residual(model: DilationModel, depth: int | None = None) -> float:
    """max_alpha ||J^* (S^{reversed alpha})^* J - B^alpha|| over |alpha| <= depth."""
    depth = min(model.gns.kernel.N, model.M_fock) if depth is None else depth
    table = enumerate_words(model.d, depth)
    J = model.J.toarray()
    Z = model.adjoint_words(table, J)
    worst = 0.0
    for w in table:
        lhs = J.conj().T @ Z[w.letters[::-1]]
        worst = max(worst, float(np.linalg.norm(lhs - shift_products(model.gns, w.letters), 2)))
    return worst


def _check_depth(depth: int, limit: int, what: str):
    if depth < 0 or depth > limit:
        raise DepthExceeded(f"{what}: depth {depth} outside 0..{limit}")


@dataclass(frozen=True)
class RealizationResult:
    max_residual: float
    per_pair: dict
    depth: int
    bound: float

    @property
    def ok(self) -> bool:
        return self.max_residual <= self.bound

    def to_json(self) -> dict:
        return {"max_residual": self.max_residual, "depth": self.depth, "bound": self.bound,
                "per_pair": self.per_pair}


def _pair_residuals(K: BlockKernel, model: DilationModel, depth: int, use_P: bool) -> dict:
    table = enumerate_words(model.d, depth)
    Z = model.adjoint_words(table)
    P = model.P
    out = {}
    for a in table:
        Za = Z[a.letters]
        for b in table:
            Zb = P @ Z[b.letters] if use_P else Z[b.letters]
            val = Za.conj().T @ Zb      # W^* S^a [P] (S^b)^* W
            out[f"{a.render()},{b.render()}"] = float(np.linalg.norm(K.block(a, b) - val))
    return out


def realization_check(K: BlockKernel, model: DilationModel, depth: int,
                      rel_bound: float = 1e-8) -> RealizationResult:
    """Residuals of ``K(a,b) = W^* S^a P (S^b)^* W`` for |a|, |b| <= depth."""
    _check_depth(depth, min(K.N, model.M_fock), "realization_check")
    table = _pair_residuals(K, model, depth, use_P=True)
    bound = rel_bound * (1.0 + float(np.linalg.norm(K.G)))
    return RealizationResult(max(table.values()), table, depth, bound)


@dataclass(frozen=True)
class MarginResult:
    margin: float
    tol: float
    dim: int

    @property
    def ok(self) -> bool:
        return self.margin >= -self.tol

    def to_json(self) -> dict:
        return {"margin": self.margin, "tol": self.tol, "subspace_dim": self.dim}


def domination_identity_check(model: DilationModel, K: BlockKernel, gamma_depth: int,
                              tol: float = 1e-8) -> MarginResult:
    """lambda_min of ``P - sum_i S_i P S_i^*`` compressed to span{(S^g)^* W H}."""
    _check_depth(gamma_depth, K.N - 1, "domination_identity_check")
    table = enumerate_words(model.d, gamma_depth)
    Z = model.adjoint_words(table)
    Y = orthonormal_basis(np.hstack([Z[w.letters] for w in table]))
    if Y.shape[1] == 0:
        return MarginResult(0.0, tol, 0)
    P = model.P
    PY = P @ Y
    acc = PY.copy()
    for s in model.S:
        acc -= s @ (P @ (s.conj().T @ Y))
    lam_min, _ = psd_margin(Y.conj().T @ acc)
    return MarginResult(lam_min, tol, Y.shape[1])


@dataclass(frozen=True)
class EqualityResult:
    sigma_gap: float
    a5_residual: float
    a1_residual: float
    depth: int

    def to_json(self) -> dict:
        return {"sigma_gap": self.sigma_gap, "a5_residual": self.a5_residual,
                "a1_residual": self.a1_residual, "depth": self.depth}


def sigma_gap(K: BlockKernel, depth: int) -> float:
    """max block norm of ``K - K_Sigma`` over words of length <= depth."""
    sigma = assemble_sigma(K)
    low = K.restrict(depth)
    n, m = K.n, len(low.table)
    size = m * n
    diff = (low.G - sigma.G[:size, :size]).reshape(m, n, m, n)
    return float(np.sqrt(np.max(np.sum(np.abs(diff) ** 2, axis=(1, 3)))))


def equality_case_check(K: BlockKernel, model: DilationModel, depth: int) -> EqualityResult:
    """Gap ``K - K_Sigma`` and residual of ``K(a,b) = W^* S^a (S^b)^* W`` (no P)."""
    _check_depth(depth, min(K.N - 1, model.M_fock - 1), "equality_case_check")
    a5 = _pair_residuals(K, model, depth, use_P=False)
    a1 = _pair_residuals(K, model, depth, use_P=True)
    return EqualityResult(sigma_gap(K, depth), max(a5.values()), max(a1.values()), depth)


@dataclass(frozen=True)
class CuntzResult:
    isometry_residual: float
    completeness_defect_rank: int
    degenerate: bool

    def to_json(self) -> dict:
        return {"isometry_residual": self.isometry_residual,
                "completeness_defect_rank": self.completeness_defect_rank,
                "degenerate": self.degenerate}


def _sparse_norm2(G: sp.spmatrix) -> float:
    """Spectral norm of a sparse matrix via its nonzero rows and columns."""
    G = G.tocoo()
    if G.nnz == 0:
        return 0.0
    rows, cols = np.unique(G.row), np.unique(G.col)
    return float(np.linalg.norm(G.tocsr()[rows][:, cols].toarray(), 2))


def _sparse_hermitian_rank(G: sp.spmatrix, tol: float) -> int:
    """Numerical rank of a sparse Hermitian matrix, one connected block at a time."""
    G = G.tocsr()
    G.eliminate_zeros()
    n_comp, labels = connected_components(abs(G) > 0, directed=False)
    rank = 0
    for c in range(n_comp):
        idx = np.flatnonzero(labels == c)
        block = G[idx][:, idx].toarray()
        if idx.size == 1:
            rank += int(abs(block[0, 0]) > tol)
            continue
        w, _ = hermitian_eig(block, hermiticity_tol=1e-8)
        rank += int(np.sum(np.abs(w) > tol))
    return rank


def cuntz_residual(model: DilationModel, rank_tol: float = 1e-8) -> CuntzResult:
    """Row-isometry residual below the top Fock level, and the rank of
    ``Pi_low - sum_i S_i S_i^*`` (the truncation's gap to a Cuntz family)."""
    Pi = model.low_projection()
    worst = 0.0
    for i, si in enumerate(model.S):
        for j, sj in enumerate(model.S):
            G = si.conj().T @ sj @ Pi
            if i == j:
                G = G - Pi
            worst = max(worst, _sparse_norm2(G))
    gap = Pi - sum(s @ s.conj().T for s in model.S)
    rank = _sparse_hermitian_rank(gap, rank_tol)
    return CuntzResult(worst, rank, model.defect_dim == 0)


def apply_poly_adjoint(model: DilationModel, g: NcPoly, X: np.ndarray) -> np.ndarray:
    """``g(S)^* X``."""
    return apply_poly(g, model.S, X, side="adjoint")
