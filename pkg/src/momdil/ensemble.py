"""Finitely supported random operator tuples.

A probability space here is a finite list of weighted scenarios, so every
expectation is an exact weighted sum taken in scenario order.

Randomness comes from numpy's PCG64 bit generator, which yields the same
stream on every platform for a given seed.  Scenario ``k`` of a generator
call with seed ``s`` draws from ``SeedSequence(s, spawn_key=(k,))``, and
standard complex Gaussians are produced by Box-Muller from its uniforms.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import AlphabetMismatch, ParseError, ValidationError
from .linalg import adjoint, as_matrix, psd_margin
from .ncpoly import NcPoly, apply_poly
from .words import Word

WEIGHT_SUM_TOL = 1e-9


@dataclass(frozen=True)
class Scenario:
    weight: float
    ops: tuple[np.ndarray, ...]


@dataclass(frozen=True)
class OperatorEnsemble:
    d: int
    n: int
    scenarios: tuple[Scenario, ...]
    label: str = ""

    def __post_init__(self):
        if self.d < 1 or self.n < 1:
            raise ValidationError(f"need d, n >= 1, got d={self.d}, n={self.n}")
        if not self.scenarios:
            raise ValidationError("ensemble has no scenarios")
        for k, sc in enumerate(self.scenarios):
            if not sc.weight > 0:
                raise ValidationError(f"scenario {k}: weight {sc.weight} is not positive")
            if len(sc.ops) != self.d:
                raise ValidationError(f"scenario {k}: expected {self.d} operators, got {len(sc.ops)}")
            for i, A in enumerate(sc.ops):
                if A.shape != (self.n, self.n):
                    raise ValidationError(
                        f"scenario {k}, operator {i + 1}: shape {A.shape} != ({self.n}, {self.n})"
                    )
        total = math.fsum(sc.weight for sc in self.scenarios)
        if abs(total - 1.0) > 1e-12:
            raise ValidationError(f"weights sum to {total!r}, not 1")

    @classmethod
    def from_arrays(cls, weights: Sequence[float], ops, label: str = "",
                    renormalize: bool = True) -> "OperatorEnsemble":
        """Build from weights and a nested ``[scenario][i]`` list of matrices."""
        weights = [float(w) for w in weights]
        if len(weights) != len(ops):
            raise ValidationError(f"{len(weights)} weights for {len(ops)} scenarios")
        if any(not w > 0 for w in weights):
            raise ValidationError("weights must be positive")
        total = math.fsum(weights)
        if renormalize:
            if abs(total - 1.0) > WEIGHT_SUM_TOL:
                raise ValidationError(f"weights sum to {total!r}, outside 1 +/- {WEIGHT_SUM_TOL}")
            weights = [w / total for w in weights]
        mats = [tuple(as_matrix(A) for A in sc) for sc in ops]
        if not mats or not mats[0]:
            raise ValidationError("need at least one scenario with at least one operator")
        d = len(mats[0])
        n = mats[0][0].shape[0]
        return cls(d, n, tuple(Scenario(w, m) for w, m in zip(weights, mats)), label)

    @classmethod
    def deterministic(cls, ops, label: str = "") -> "OperatorEnsemble":
        return cls.from_arrays([1.0], [list(ops)], label)

    @property
    def weights(self) -> np.ndarray:
        return np.array([sc.weight for sc in self.scenarios])

    def __len__(self) -> int:
        return len(self.scenarios)


@dataclass(frozen=True)
class RandomOperator:
    """One operator per scenario, sharing the parent ensemble's weights."""

    n: int
    weights: tuple[float, ...]
    values: tuple[np.ndarray, ...]

    def expect(self, f) -> np.ndarray:
        acc = None
        for w, X in zip(self.weights, self.values):
            term = w * f(X)
            acc = term if acc is None else acc + term
        return acc

    def second_moment(self) -> np.ndarray:
        """E[X X^*]."""
        return self.expect(lambda X: X @ adjoint(X))

    def __sub__(self, other: "RandomOperator") -> "RandomOperator":
        return RandomOperator(self.n, self.weights,
                              tuple(a - b for a, b in zip(self.values, other.values)))

    def __add__(self, other: "RandomOperator") -> "RandomOperator":
        return RandomOperator(self.n, self.weights,
                              tuple(a + b for a, b in zip(self.values, other.values)))

    def __rmul__(self, c) -> "RandomOperator":
        return RandomOperator(self.n, self.weights, tuple(c * a for a in self.values))


# ------------------------------------------------------------------ sampling

def scenario_rng(seed: int, k: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(k,))))


def complex_gaussians(rng: np.random.Generator, shape) -> np.ndarray:
    """i.i.d. standard complex Gaussians (E|z|^2 = 1) via Box-Muller."""
    size = int(np.prod(shape))
    u1 = 1.0 - rng.random(size)  # (0, 1]
    u2 = rng.random(size)
    radius = np.sqrt(-np.log(u1))  # |z|^2 ~ Exp(1)
    z = radius * np.exp(2j * np.pi * u2)
    return z.reshape(shape)


def ginibre(rng: np.random.Generator, n: int, m: int | None = None) -> np.ndarray:
    return complex_gaussians(rng, (n, n if m is None else m))


def haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    Q, R = np.linalg.qr(ginibre(rng, n))
    diag = np.diagonal(R)
    phases = diag / np.abs(diag)
    return Q * phases


def gen_row_contraction_ensemble(d: int, n: int, k_scenarios: int, seed: int,
                                 slack: float) -> OperatorEnsemble:
    """Scenarios with ``lambda_max(sum_i A_i A_i^*) = 1 - slack`` exactly."""
    if not 0.0 < slack < 1.0:
        raise ValueError(f"slack must lie in (0, 1), got {slack}")
    if min(d, n, k_scenarios) < 1:
        raise ValueError("d, n and k_scenarios must be positive")
    scenarios = []
    for k in range(k_scenarios):
        rng = scenario_rng(seed, k)
        G = [ginibre(rng, n) for _ in range(d)]
        _, lam = psd_margin(sum(g @ adjoint(g) for g in G))
        c = math.sqrt((1.0 - slack) / lam)
        scenarios.append([c * g for g in G])
    weights = _weights(seed, k_scenarios)
    return OperatorEnsemble.from_arrays(
        weights, scenarios, f"row_contraction(d={d},n={n},k={k_scenarios},seed={seed},slack={slack})"
    )


def gen_coisometry_ensemble(d: int, n: int, k_scenarios: int, seed: int) -> OperatorEnsemble:
    """Scenarios with ``sum_i A_i A_i^* = I_n``: blocks of the top rows of a Haar unitary."""
    if min(d, n, k_scenarios) < 1:
        raise ValueError("d, n and k_scenarios must be positive")
    scenarios = []
    for k in range(k_scenarios):
        rng = scenario_rng(seed, k)
        R = haar_unitary(rng, d * n)[:n, :]
        scenarios.append([R[:, i * n:(i + 1) * n].copy() for i in range(d)])
    weights = _weights(seed, k_scenarios)
    return OperatorEnsemble.from_arrays(
        weights, scenarios, f"coisometry(d={d},n={n},k={k_scenarios},seed={seed})"
    )


def gen_ginibre_ensemble(d: int, n: int, k_scenarios: int, seed: int,
                         scale: float = 1.0) -> OperatorEnsemble:
    """Unnormalized Ginibre tuples (generally not dominated)."""
    scenarios = []
    for k in range(k_scenarios):
        rng = scenario_rng(seed, k)
        scenarios.append([scale * ginibre(rng, n) / math.sqrt(n) for _ in range(d)])
    return OperatorEnsemble.from_arrays(_weights(seed, k_scenarios), scenarios,
                                        f"ginibre(d={d},n={n},k={k_scenarios},seed={seed})")


def _weights(seed: int, k: int) -> list[float]:
    if k == 1:
        return [1.0]
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(2**31,))))
    w = 0.5 + rng.random(k)
    w = w / math.fsum(w)
    w[-1] = 1.0 - math.fsum(w[:-1])
    return [float(x) for x in w]


# ------------------------------------------------------------------- moments

def word_product(ops: Sequence[np.ndarray], alpha: Word, n: int) -> np.ndarray:
    out = np.eye(n, dtype=np.complex128)
    for i in alpha.letters:
        out = out @ ops[i - 1]
    return out


def word_moment(E: OperatorEnsemble, alpha: Word, beta: Word) -> np.ndarray:
    """E[A^alpha (A^beta)^*], summed in scenario order."""
    for w in (alpha, beta):
        if w.d != E.d:
            raise AlphabetMismatch(f"word {w} over {w.d} letters, ensemble has d={E.d}")
    acc = np.zeros((E.n, E.n), dtype=np.complex128)
    for sc in E.scenarios:
        Aa = word_product(sc.ops, alpha, E.n)
        Ab = word_product(sc.ops, beta, E.n)
        acc += sc.weight * (Aa @ adjoint(Ab))
    return acc


def apply_random(E: OperatorEnsemble, p: NcPoly) -> RandomOperator:
    """Scenario-wise evaluation ``omega -> p(A(omega))``."""
    if p.d != E.d:
        raise AlphabetMismatch(f"polynomial in {p.d} variables, ensemble has d={E.d}")
    eye = np.eye(E.n, dtype=np.complex128)
    values = tuple(apply_poly(p, sc.ops, eye, "direct") for sc in E.scenarios)
    return RandomOperator(E.n, tuple(sc.weight for sc in E.scenarios), values)


# ----------------------------------------------------------------- file I/O

def matrix_to_json(M: np.ndarray) -> dict:
    M = np.asarray(M, dtype=np.complex128)
    return {
        "rows": int(M.shape[0]),
        "cols": int(M.shape[1]),
        "re": [float(x) for x in M.real.ravel()],
        "im": [float(x) for x in M.imag.ravel()],
    }


def matrix_from_json(obj) -> np.ndarray:
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        re_ = np.asarray(obj["re"], dtype=np.float64)
        im = np.asarray(obj.get("im", [0.0] * (rows * cols)), dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed matrix object: {exc}") from exc
    if re_.shape != (rows * cols,) or im.shape != (rows * cols,):
        raise ValidationError(f"matrix entries do not match declared shape {rows}x{cols}")
    M = (re_ + 1j * im).reshape(rows, cols)
    if not np.all(np.isfinite(M)):
        raise ValidationError("matrix has non-finite entries")
    return M


def ensemble_to_json(E: OperatorEnsemble) -> dict:
    return {
        "d": E.d,
        "n": E.n,
        "label": E.label,
        "scenarios": [
            {"weight": sc.weight, "ops": [matrix_to_json(A) for A in sc.ops]}
            for sc in E.scenarios
        ],
    }


def ensemble_from_json(obj) -> OperatorEnsemble:
    try:
        d, n = int(obj["d"]), int(obj["n"])
        label = str(obj.get("label", ""))
        raw = obj["scenarios"]
        weights = [float(sc["weight"]) for sc in raw]
        ops = [[matrix_from_json(m) for m in sc["ops"]] for sc in raw]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed scenario file: {exc}") from exc
    if not raw:
        raise ValidationError("scenario file lists no scenarios")
    for k, sc in enumerate(ops):
        if len(sc) != d:
            raise ValidationError(f"scenario {k}: expected {d} operators, got {len(sc)}")
        for i, A in enumerate(sc):
            if A.shape != (n, n):
                raise ValidationError(f"scenario {k}, operator {i + 1}: shape {A.shape} != ({n}, {n})")
    return OperatorEnsemble.from_arrays(weights, ops, label)


def save_ensemble(E: OperatorEnsemble, path) -> None:
    Path(path).write_text(json.dumps(ensemble_to_json(E), indent=1) + "\n", encoding="utf-8")


def load_ensemble(path) -> OperatorEnsemble:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: top level must be an object")
    return ensemble_from_json(obj)
