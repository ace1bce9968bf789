"""Noncommutative polynomials in Z_1, ..., Z_d.

Text grammar (whitespace insensitive)::

    poly   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := scalar | gen ('^' uint)? | '(' poly ')'
    gen    := 'Z' uint
    scalar := '(' real (('+'|'-') real 'i')? ')' | '(' real 'i' ')' | real

A parenthesised group is read as a complex scalar when it matches the scalar
form, otherwise as a nested polynomial.  The optional leading sign is an
extension so that rendered negative terms reparse.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    AlphabetMismatch,
    DimensionMismatch,
    EmptyInput,
    GeneratorOutOfRange,
    OutOfRange,
    PolySyntaxError,
)
from .linalg import adjoint, as_matrix
from .words import Word


@dataclass(frozen=True)
class NcPoly:
    d: int
    coeffs: Mapping[Word, complex] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for w, c in self.coeffs.items():
            if w.d != self.d:
                raise AlphabetMismatch(f"word {w} has alphabet {w.d}, polynomial has {self.d}")
            c = complex(c)
            if c != 0:
                clean[w] = c
        object.__setattr__(self, "coeffs", clean)

    # construction helpers
    @classmethod
    def zero(cls, d: int) -> "NcPoly":
        return cls(d, {})

    @classmethod
    def constant(cls, c: complex, d: int) -> "NcPoly":
        return cls(d, {Word.empty(d): c})

    @classmethod
    def generator(cls, i: int, d: int) -> "NcPoly":
        return cls(d, {Word((i,), d): 1.0})

    @classmethod
    def monomial(cls, letters: Sequence[int], d: int, c: complex = 1.0) -> "NcPoly":
        return cls(d, {Word(tuple(letters), d): c})

    @property
    def degree(self) -> int:
        """Longest word with a nonzero coefficient (0 for the zero polynomial)."""
        return max((len(w) for w in self.coeffs), default=0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, NcPoly):
            return NotImplemented
        return self.d == other.d and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.d, frozenset(self.coeffs.items())))

    def __add__(self, other):
        if isinstance(other, NcPoly):
            return add(self, other)
        return add(self, NcPoly.constant(other, self.d))

    __radd__ = __add__

    def __neg__(self):
        return scale(self, -1.0)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, NcPoly):
            return multiply(self, other)
        return scale(self, other)

    def __rmul__(self, other):
        return scale(self, other)

    def __repr__(self):
        return f"NcPoly(d={self.d}, {render(self)!r})"

    def __str__(self):
        return render(self)


def _check_same(p: NcPoly, q: NcPoly):
    if p.d != q.d:
        raise AlphabetMismatch(f"alphabet sizes {p.d} and {q.d} differ")


def add(p: NcPoly, q: NcPoly) -> NcPoly:
    _check_same(p, q)
    out = dict(p.coeffs)
    for w, c in q.coeffs.items():
        out[w] = out.get(w, 0) + c
    return NcPoly(p.d, out)


def scale(p: NcPoly, c: complex) -> NcPoly:
    return NcPoly(p.d, {w: c * a for w, a in p.coeffs.items()})


def multiply(p: NcPoly, q: NcPoly) -> NcPoly:
    """Convolution over word concatenation."""
    _check_same(p, q)
    out: dict[Word, complex] = {}
    for a, ca in p.coeffs.items():
        for b, cb in q.coeffs.items():
            w = a + b
            out[w] = out.get(w, 0) + ca * cb
    return NcPoly(p.d, out)


def poly_arith(op: str, p: NcPoly, q_or_scalar) -> NcPoly:
    if op == "add":
        return add(p, q_or_scalar)
    if op == "scale":
        return scale(p, q_or_scalar)
    if op == "multiply":
        return multiply(p, q_or_scalar)
    raise ValueError(f"unknown operation {op!r}")


def radial_dilate(p: NcPoly, r: float) -> NcPoly:
    """Scale the coefficient on each word by ``r ** len(word)``."""
    if not 0.0 <= r <= 1.0:
        raise OutOfRange(f"radius {r} outside [0, 1]")
    return NcPoly(p.d, {w: (r ** len(w)) * c for w, c in p.coeffs.items()})


def coeff_l2_norm(p: NcPoly) -> float:
    return float(np.sqrt(sum(abs(c) ** 2 for c in p.coeffs.values())))


# ---------------------------------------------------------------- evaluation

def _check_tuple(p: NcPoly, T) -> list[np.ndarray]:
    mats = [as_matrix(t) for t in T]
    if len(mats) != p.d:
        raise AlphabetMismatch(f"polynomial in {p.d} variables, got {len(mats)} matrices")
    if not mats:
        raise DimensionMismatch("empty operator tuple")
    n = mats[0].shape[0]
    for t in mats:
        if t.shape != (n, n):
            raise DimensionMismatch(f"expected {n}x{n} matrices, got {t.shape}")
    return mats


def evaluate_poly(p: NcPoly, T, side: str = "direct") -> np.ndarray:
    """``p(T)`` or its adjoint ``p(T)^*``.

    The adjoint is summed as ``sum conj(c) (T^*)^{reversed word}`` rather than
    by conjugating the direct result.
    """
    mats = _check_tuple(p, T)
    n = mats[0].shape[0]
    return apply_poly(p, mats, np.eye(n, dtype=np.complex128), side)


def apply_poly(p: NcPoly, T, X: np.ndarray, side: str = "direct") -> np.ndarray:
    """``p(T) @ X`` (side="direct") or ``p(T)^* @ X`` (side="adjoint").

    Products are built right-to-left by prefix recursion over the words that
    occur in ``p`` so each shared prefix is applied once.
    """
    if side not in ("direct", "adjoint"):
        raise ValueError(f"side must be 'direct' or 'adjoint', got {side!r}")
    mats = list(T)
    if len(mats) != p.d:
        raise AlphabetMismatch(f"polynomial in {p.d} variables, got {len(mats)} matrices")
    X = np.asarray(X, dtype=np.complex128)
    out = np.zeros_like(X)
    if side == "adjoint":
        # (T^a)^* X = T_{ik}^* ... T_{i1}^* X: memoize on prefixes of a.
        mats = [adjoint(t) for t in mats]
        cache: dict[tuple, np.ndarray] = {(): X}

        def img(letters):
            if letters not in cache:
                cache[letters] = mats[letters[-1] - 1] @ img(letters[:-1])
            return cache[letters]

        for w, c in p.coeffs.items():
            out += np.conj(c) * img(w.letters)
    else:
        # T^a X = T_{i1} ... T_{ik} X: memoize on suffixes of a.
        cache = {(): X}

        def img(letters):
            if letters not in cache:
                cache[letters] = mats[letters[0] - 1] @ img(letters[1:])
            return cache[letters]

        for w, c in p.coeffs.items():
            out += c * img(w.letters)
    return out


# ------------------------------------------------------------ text rendering

def _render_scalar(c: complex) -> str:
    re_, im = c.real + 0.0, c.imag + 0.0    # + 0.0 folds -0.0 into 0.0
    sign = "-" if im < 0 else "+"
    return f"({re_!r}{sign}{abs(im)!r}i)"


def render(p: NcPoly) -> str:
    """Exact text form; ``parse_ncpoly(render(p), p.d) == p``."""
    if not p.coeffs:
        return "0"
    items = sorted(p.coeffs.items(), key=lambda kv: (len(kv[0]), kv[0].letters))
    terms = []
    for w, c in items:
        parts = [_render_scalar(c)] + [f"Z{i}" for i in w.letters]
        terms.append("*".join(parts))
    return " + ".join(terms)


def pretty(p: NcPoly) -> str:
    """Compact human-readable form (not guaranteed to round-trip exactly)."""
    if not p.coeffs:
        return "0"
    out = []
    for w, c in sorted(p.coeffs.items(), key=lambda kv: (len(kv[0]), kv[0].letters)):
        mono = "*".join(f"Z{i}" for i in w.letters)
        coef = c.real if c.imag == 0 else c
        if not mono:
            out.append(f"{coef:g}" if c.imag == 0 else str(c))
        elif coef == 1:
            out.append(mono)
        else:
            out.append(f"{coef:g}*{mono}" if c.imag == 0 else f"{c}*{mono}")
    return " + ".join(out)


# ------------------------------------------------------------------- parsing

_REAL = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_REAL_RE = re.compile(_REAL)
_UINT_RE = re.compile(r"\d+")
_PAREN_SCALAR_RE = re.compile(
    rf"\(\s*(?P<sr>[+-]?)\s*(?P<re>{_REAL})\s*"
    rf"(?:(?P<si>[+-])\s*(?P<im>{_REAL})\s*i\s*)?\)"
)
_PAREN_IMAG_RE = re.compile(rf"\(\s*(?P<si>[+-]?)\s*(?P<im>{_REAL})\s*i\s*\)")


class _Parser:
    def __init__(self, text: str, d: int):
        self.text = text
        self.d = d
        self.pos = 0

    def error(self, message, expected=()):
        raise PolySyntaxError(message, self.pos, expected, self.text)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self) -> NcPoly:
        if not self.text.strip():
            raise EmptyInput("empty polynomial text", 0, {"term"}, self.text)
        p = self.poly()
        if self.peek():
            self.error(f"unexpected {self.peek()!r}", {"'+'", "'-'", "'*'", "end of input"})
        return p

    def poly(self) -> NcPoly:
        sign = 1.0
        if self.peek() in "+-" and self.peek():
            sign = -1.0 if self.text[self.pos] == "-" else 1.0
            self.pos += 1
        acc = scale(self.term(), sign)
        while self.peek() in ("+", "-") and self.peek():
            sign = -1.0 if self.text[self.pos] == "-" else 1.0
            self.pos += 1
            acc = add(acc, scale(self.term(), sign))
        return acc

    def term(self) -> NcPoly:
        acc = self.factor()
        while self.peek() == "*":
            self.pos += 1
            acc = multiply(acc, self.factor())
        return acc

    def factor(self) -> NcPoly:
        ch = self.peek()
        if ch == "(":
            for pattern in (_PAREN_SCALAR_RE, _PAREN_IMAG_RE):
                m = pattern.match(self.text, self.pos)
                if m:
                    self.pos = m.end()
                    return NcPoly.constant(self._scalar(m), self.d)
            self.pos += 1
            inner = self.poly()
            if self.peek() != ")":
                self.error("unclosed parenthesis", {"')'", "'+'", "'-'", "'*'"})
            self.pos += 1
            return inner
        if ch == "Z":
            start = self.pos
            self.pos += 1
            m = _UINT_RE.match(self.text, self.pos)
            if not m:
                self.error("generator index missing", {"unsigned integer"})
            k = int(m.group())
            if not 1 <= k <= self.d:
                raise GeneratorOutOfRange(
                    f"generator Z{k} outside Z1..Z{self.d}", start, (), self.text
                )
            self.pos = m.end()
            power = 1
            if self.peek() == "^":
                self.pos += 1
                self.skip()
                m = _UINT_RE.match(self.text, self.pos)
                if not m:
                    self.error("exponent missing", {"unsigned integer"})
                power = int(m.group())
                self.pos = m.end()
            return NcPoly.monomial((k,) * power, self.d)
        m = _REAL_RE.match(self.text, self.pos) if ch else None
        if m:
            self.pos = m.end()
            nxt = self.text[self.pos:self.pos + 1]
            if nxt.isalnum() or nxt == ".":
                self.error(f"unexpected {nxt!r} after number", {"'*'", "'+'", "'-'", "')'"})
            return NcPoly.constant(float(m.group()), self.d)
        what = repr(ch) if ch else "end of input"
        self.error(f"unexpected {what}", {"number", "'Z'", "'('"})

    @staticmethod
    def _scalar(m: re.Match) -> complex:
        gd = m.groupdict()
        re_ = float(gd["re"]) if gd.get("re") else 0.0
        if gd.get("sr") == "-":
            re_ = -re_
        im = float(gd["im"]) if gd.get("im") else 0.0
        if gd.get("si") == "-":
            im = -im
        return complex(re_, im)


def parse_ncpoly(text: str, d: int) -> NcPoly:
    """Parse polynomial text over ``d`` generators, collecting like terms."""
    return _Parser(text, d).parse()


def random_ncpoly(d: int, max_degree: int, rng: np.random.Generator,
                  n_terms: int | None = None) -> NcPoly:
    """Random polynomial with Gaussian complex coefficients on random words.

    Always includes at least one word of length ``max_degree``.
    """
    n_terms = int(rng.integers(1, 2 + 2 * max_degree)) if n_terms is None else n_terms
    coeffs: dict[Word, complex] = {}
    for t in range(n_terms):
        length = max_degree if t == 0 else int(rng.integers(0, max_degree + 1))
        letters = tuple(int(x) for x in rng.integers(1, d + 1, size=length))
        c = complex(rng.standard_normal(), rng.standard_normal())
        w = Word(letters, d)
        coeffs[w] = coeffs.get(w, 0) + c
    return NcPoly(d, coeffs)
