"""Kolmogorov factorization of a moment kernel and the shift operators B_i.

The factor space H' is represented in coordinates: ``F`` is an r x (m*n)
matrix with ``F^* F = G``, and ``V_alpha`` is the r x n column block of ``F``
at alpha's position.  ``B_i`` is the r x r matrix sending each
``V_alpha`` column (|alpha| <= N-1) to the matching ``V_{alpha i}`` column,
extended by zero off the span of those columns.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import IllConditioned, NotDominated, NotPSD
from .kernel import BlockKernel, pd_order_check, DEFAULT_PD_TOL
from .linalg import adjoint, hermitian_eig, psd_margin
from .words import Word

DEFAULT_RANK_TOL = 1e-12
CONTRACTION_TOL = 1e-8
SHIFT_RESIDUAL_LIMIT = 1e-6


@dataclass
class GnsModel:
    kernel: BlockKernel
    F: np.ndarray
    rank_tol: float
    Q: np.ndarray | None = None
    B: list[np.ndarray] = field(default_factory=list)
    shift_residual: float | None = None

    @property
    def r(self) -> int:
        return self.F.shape[0]

    @property
    def n(self) -> int:
        return self.kernel.n

    @property
    def d(self) -> int:
        return self.kernel.d

    @property
    def table(self):
        return self.kernel.table

    def V(self, w: Word) -> np.ndarray:
        return self.F[:, self.kernel.block_slice(w)]

    def columns(self, N: int) -> np.ndarray:
        """Columns of ``F`` for all words of length <= N."""
        return self.F[:, : self.table.level_size(N) * self.n]


def kolmogorov_factorize(K: BlockKernel, rank_tol: float = DEFAULT_RANK_TOL) -> GnsModel:
    """Factor ``G = F^* F`` from the eigenpairs above ``rank_tol * lambda_max``."""
    w, U = hermitian_eig(K.G)
    lam_max = max(float(w[-1]), 0.0) if w.size else 0.0
    if w.size and w[0] < -rank_tol * lam_max:
        raise NotPSD(f"kernel eigenvalue {w[0]:.3e} below -{rank_tol:.1e} * {lam_max:.3e}")
    keep = w > rank_tol * lam_max
    F = np.sqrt(w[keep])[:, None] * adjoint(U[:, keep])
    return GnsModel(K, F, rank_tol)


def factorization_residual(gns: GnsModel) -> float:
    """max over word pairs of ||V_alpha^* V_beta - K(alpha, beta)||_F."""
    n = gns.n
    R = adjoint(gns.F) @ gns.F - gns.kernel.G
    m = len(gns.table)
    blocks = R.reshape(m, n, m, n)
    return float(np.sqrt(np.max(np.sum(np.abs(blocks) ** 2, axis=(1, 3)))))


def build_shifts(gns: GnsModel, check_domination: bool = True,
                 pd_tol: float = DEFAULT_PD_TOL) -> GnsModel:
    """Solve ``B_i V_alpha = V_{alpha i}`` for |alpha| <= N-1 in least squares.

    Raises ``NotDominated`` when ``K_Sigma <= K`` fails on W_{N-1}, since the
    relations are then inconsistent.
    """
    K = gns.kernel
    if check_domination:
        dom = pd_order_check(K, pd_tol)
        if not dom.ok:
            raise NotDominated(f"K_Sigma is not dominated by K (margin {dom.margin:.3e})",
                               dom.margin, dom.witness)
    low = K.table.restrict(K.N - 1)
    n = gns.n
    F_low = gns.columns(K.N - 1)

    # pinv of F_low via SVD; tiny directions are dropped, the domination
    # inequality bounds the residual this causes by the cut itself.
    U, s, Vh = np.linalg.svd(F_low, full_matrices=False)
    cut = (s[0] if s.size else 0.0) * np.sqrt(gns.rank_tol)
    keep = s > cut
    U, s, Vh = U[:, keep], s[keep], Vh[keep]
    Q = U @ adjoint(U)
    B = []
    residual = 0.0
    for i in range(1, gns.d + 1):
        idx = np.array([K.table.position(w + Word((i,), gns.d)) for w in low])
        cols = (idx[:, None] * n + np.arange(n)[None, :]).ravel()
        F_shift = gns.F[:, cols]
        Bi = ((F_shift @ adjoint(Vh)) / s[None, :]) @ adjoint(U)
        B.append(Bi)
        residual = max(residual, float(np.linalg.norm(Bi @ F_low - F_shift)))
    if residual > SHIFT_RESIDUAL_LIMIT:
        raise IllConditioned(f"shift relations residual {residual:.3e} exceeds {SHIFT_RESIDUAL_LIMIT}")
    gns.Q = Q
    gns.B = B
    gns.shift_residual = residual
    return gns


@dataclass(frozen=True)
class ContractionResult:
    lambda_max: float
    verdict: str
    tol: float

    @property
    def ok(self) -> bool:
        return self.verdict == "pass"

    def to_json(self) -> dict:
        return {"lambda_max": self.lambda_max, "verdict": self.verdict, "tol": self.tol}


def column_sum(gns: GnsModel) -> np.ndarray:
    """sum_i B_i^* B_i."""
    return sum(adjoint(b) @ b for b in gns.B)


def column_contraction_check(gns: GnsModel, tol: float = CONTRACTION_TOL) -> ContractionResult:
    _, lam = psd_margin(column_sum(gns))
    return ContractionResult(lam, "pass" if lam <= 1.0 + tol else "fail", tol)


def shift_products(gns: GnsModel, letters) -> np.ndarray:
    """``B^{letters} = B_{i1} ... B_{ik}``."""
    out = np.eye(gns.r, dtype=np.complex128)
    for i in letters:
        out = out @ gns.B[i - 1]
    return out


def cyclicity_residual(gns: GnsModel) -> float:
    """max_alpha ||V_alpha - B^{reversed alpha} V_empty||_F over the whole table."""
    V0 = gns.V(Word.empty(gns.d))
    cache = {(): V0}
    worst = 0.0
    for w in gns.table:
        if w.letters:
            cache[w.letters] = gns.B[w.letters[-1] - 1] @ cache[w.letters[:-1]]
            worst = max(worst, float(np.linalg.norm(cache[w.letters] - gns.V(w))))
    return worst
