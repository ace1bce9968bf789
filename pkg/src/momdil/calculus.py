"""Mean-square functional calculus checks.

Polynomials act on an ensemble scenario by scenario (``apply_random``); the
dilation is only consulted for cross-identities, never to define values.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dilation import DilationModel
from .ensemble import OperatorEnsemble, RandomOperator, apply_random, complex_gaussians, scenario_rng
from .errors import CapacityExceeded, DepthExceeded, OutOfRange
from .fock import default_level, fock_norm
from .kernel import BlockKernel, DominationResult, assemble_kernel, pd_order_check
from .linalg import operator_norm
from .ncpoly import NcPoly, apply_poly, radial_dilate

CHECK_TOL = 1e-8
ESCALATION_STEP = 2
MAX_ESCALATIONS = 3
ESCALATION_WINDOW = 10.0
CAUCHY_TOL = 1e-10


def ms_norm(X: RandomOperator) -> float:
    """``||E[X X^*]||^{1/2}``."""
    return float(np.sqrt(operator_norm(X.second_moment())))


def ms_probe(X: RandomOperator, u: np.ndarray) -> float:
    """``E ||X^* u||^2``."""
    u = np.asarray(u, dtype=np.complex128)
    return float(sum(w * np.vdot(Xk.conj().T @ u, Xk.conj().T @ u).real
                     for w, Xk in zip(X.weights, X.values)))


@dataclass
class MsReport:
    lhs: float
    rhs: float
    tol: float
    levels: list[int] = field(default_factory=list)
    flags: list[str] = field(default_factory=list)

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        return self.margin >= -self.tol * max(1.0, self.rhs)

    def to_json(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "margin": self.margin, "tol": self.tol,
                "verdict": "pass" if self.passed else "fail", "fock_levels": list(self.levels),
                "flags": list(self.flags)}


def hypothesis_flags(E: OperatorEnsemble, degree: int,
                     domination: DominationResult | None = None) -> list[str]:
    """Check ``K_Sigma <= K`` on words of length <= degree unless already supplied."""
    if domination is None or domination.depth < degree:
        try:
            domination = pd_order_check(assemble_kernel(E, max(degree, 0) + 1))
        except CapacityExceeded:
            return ["HypothesisNotChecked"]
    return [] if domination.ok else ["NotDominated"]


def _bounded_check(lhs: float, p: NcPoly, M: int | None, tol: float, squared: bool,
                   flags: list[str]) -> MsReport:
    M = default_level(p) if M is None else M
    report = MsReport(lhs, 0.0, tol, [], flags)
    for attempt in range(MAX_ESCALATIONS + 1):
        try:
            value = fock_norm(p, M).value
        except CapacityExceeded:
            report.flags.append(f"CapacityExceeded(M={M})")
            break
        report.rhs = value ** 2 if squared else value
        report.levels.append(M)
        if report.passed:
            break
        if report.margin < -ESCALATION_WINDOW * tol * max(1.0, report.rhs):
            break
        M += ESCALATION_STEP
    return report


def vn_check(E: OperatorEnsemble, p: NcPoly, M: int | None = None, tol: float = CHECK_TOL,
             domination: DominationResult | None = None) -> MsReport:
    """``||p(A)||_ms^2`` against the certified lower bound of ``||p(L)||^2``."""
    flags = hypothesis_flags(E, p.degree, domination)
    lhs = ms_norm(apply_random(E, p)) ** 2
    return _bounded_check(lhs, p, M, tol, True, flags)


def lipschitz_check(E: OperatorEnsemble, p: NcPoly, q: NcPoly, M: int | None = None,
                    tol: float = CHECK_TOL, domination: DominationResult | None = None) -> MsReport:
    """``||p(A) - q(A)||_ms`` against ``||(p - q)(L)||``."""
    diff = p - q
    flags = hypothesis_flags(E, diff.degree, domination)
    lhs = ms_norm(apply_random(E, p) - apply_random(E, q))
    return _bounded_check(lhs, diff, M, tol, False, flags)


@dataclass(frozen=True)
class IdentityGap:
    lhs: float
    rhs: float
    gap: float
    bound: float

    @property
    def ok(self) -> bool:
        return self.gap <= self.bound

    def to_json(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "gap": self.gap, "bound": self.bound}


def _depth_guard(g: NcPoly, K: BlockKernel, model: DilationModel):
    limit = min(K.N, model.M_fock)
    if g.degree > limit:
        raise DepthExceeded(f"degree {g.degree} exceeds min(N, M_fock) = {limit}")


def dilation_side(model: DilationModel, g: NcPoly, u: np.ndarray, P_sqrt=None) -> float:
    """``||P^{1/2} g(S)^* W u||^2``."""
    P_sqrt = model.P_sqrt() if P_sqrt is None else P_sqrt
    x = apply_poly(g, model.S, model.W @ np.asarray(u, dtype=np.complex128), "adjoint")
    y = P_sqrt @ x
    return float(np.vdot(y, y).real)


def compression_identity_check(E: OperatorEnsemble, K: BlockKernel, model: DilationModel,
                               g: NcPoly, u: np.ndarray, rel_tol: float = CHECK_TOL,
                               P_sqrt=None) -> IdentityGap:
    """``E||g(A)^* u||^2`` against ``||P^{1/2} g(S)^* W u||^2``."""
    _depth_guard(g, K, model)
    lhs = ms_probe(apply_random(E, g), u)
    rhs = dilation_side(model, g, u, P_sqrt)
    return IdentityGap(lhs, rhs, abs(lhs - rhs), rel_tol * (1.0 + lhs))


# ------------------------------------------------------------- radial layer

def default_probes(n: int, seed: int = 0, extra: int = 3) -> list[np.ndarray]:
    """Standard basis of C^n followed by ``extra`` seeded random unit vectors."""
    probes = [np.eye(n, dtype=np.complex128)[k] for k in range(n)]
    rng = scenario_rng(seed, 10_000)
    for _ in range(extra):
        v = complex_gaussians(rng, (n,))
        probes.append(v / np.linalg.norm(v))
    return probes


@dataclass(frozen=True)
class RadialSeries:
    base: NcPoly
    r_grid: tuple[float, ...]
    u_probes: tuple[np.ndarray, ...]
    tail_bound: float | None = None

    def __post_init__(self):
        grid = tuple(float(r) for r in self.r_grid)
        if any(not 0.0 < r < 1.0 for r in grid):
            raise OutOfRange("radial grid values must lie in (0, 1)")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise OutOfRange("radial grid must be strictly increasing")
        object.__setattr__(self, "r_grid", grid)
        object.__setattr__(self, "u_probes",
                           tuple(np.asarray(u, dtype=np.complex128) for u in self.u_probes))


def dyadic_grid(j_max: int) -> tuple[float, ...]:
    """``(1 - 2^{-j})`` for j = 1..j_max."""
    return tuple(1.0 - 2.0 ** -j for j in range(1, j_max + 1))


@dataclass
class RadialTable:
    rows: list[dict]
    cauchy_decay: bool
    max_identity_gap: float
    tail_bound: float | None

    def to_json(self) -> dict:
        return {"rows": self.rows, "cauchy_decay": self.cauchy_decay,
                "max_identity_gap": self.max_identity_gap, "tail_bound": self.tail_bound,
                "coefficients": "finitely supported truncation"}


def radial_diagnostic(E: OperatorEnsemble, K: BlockKernel, model: DilationModel,
                      series: RadialSeries) -> RadialTable:
    """Cauchy differences ``E||(phi_r(A) - phi_s(A))^* u||^2`` along the grid,
    each compared with its dilation-side expression."""
    _depth_guard(series.base, K, model)
    P_sqrt = model.P_sqrt()
    rows = []
    prev = [None] * len(series.u_probes)
    decay = True
    worst = 0.0
    grid = series.r_grid
    for r, s in zip(grid, grid[1:]):
        g = radial_dilate(series.base, s) - radial_dilate(series.base, r)
        X = apply_random(E, g)
        for k, u in enumerate(series.u_probes):
            diff = ms_probe(X, u)
            dil = dilation_side(model, g, u, P_sqrt)
            gap = abs(diff - dil)
            worst = max(worst, gap)
            if prev[k] is not None and diff > prev[k] + CAUCHY_TOL:
                decay = False
            prev[k] = diff
            rows.append({"r": r, "s": s, "probe": k, "difference": diff,
                         "dilation_side": dil, "identity_gap": gap})
    return RadialTable(rows, decay, worst, series.tail_bound)


def ms_sot_limit(E: OperatorEnsemble, series: RadialSeries) -> tuple[RandomOperator, list[float]]:
    """The radial limit ``Phi(phi)`` (evaluation at r = 1 for finite support)
    and ``E||(phi_{r_max}(A) - Phi(phi))^* u||^2`` for each probe."""
    limit = apply_random(E, series.base)
    r_max = series.r_grid[-1]
    approx = apply_random(E, radial_dilate(series.base, r_max))
    delta = approx - limit
    return limit, [ms_probe(delta, u) for u in series.u_probes]
