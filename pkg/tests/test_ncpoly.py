from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from momdil.errors import (
    AlphabetMismatch,
    EmptyInput,
    GeneratorOutOfRange,
    OutOfRange,
    PolySyntaxError,
)
from momdil.ncpoly import (
    NcPoly,
    apply_poly,
    coeff_l2_norm,
    evaluate_poly,
    parse_ncpoly,
    poly_arith,
    radial_dilate,
    random_ncpoly,
    render,
)
from momdil.words import Word


def _mats(rng, d, n):
    return [rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)) for _ in range(d)]


def test_parse_basic():
    p = parse_ncpoly("2*Z1*Z2 - (0.5+1i)*Z2^2 + 3", 2)
    assert p.coeffs == {Word((1, 2), 2): 2, Word((2, 2), 2): -(0.5 + 1j), Word((), 2): 3}
    assert p.degree == 2


def test_parse_collects_like_terms():
    p = parse_ncpoly("Z1 + Z1 - 2*Z1", 1)
    assert p.is_zero
    assert render(p) == "0"


def test_parse_nested_parentheses():
    p = parse_ncpoly("(Z1 + Z2)*(Z1 - Z2)", 2)
    q = parse_ncpoly("Z1^2 - Z1*Z2 + Z2*Z1 - Z2^2", 2)
    assert p == q


@pytest.mark.parametrize("text,position", [("Z1 + ", 5), ("Z1 * * Z2", 5), ("Z1^", 3), ("(Z1", 3)])
def test_syntax_error_positions(text, position):
    with pytest.raises(PolySyntaxError) as info:
        parse_ncpoly(text, 2)
    assert info.value.position == position
    assert info.value.expected


def test_empty_and_generator_range():
    with pytest.raises(EmptyInput):
        parse_ncpoly("   ", 2)
    with pytest.raises(GeneratorOutOfRange):
        parse_ncpoly("Z3", 2)


def test_evaluate_matches_explicit_products(rng):
    A = _mats(rng, 2, 3)
    p = parse_ncpoly("1 + 2*Z1*Z2 - (0+1i)*Z2*Z2*Z1", 2)
    expected = np.eye(3) + 2 * A[0] @ A[1] - 1j * A[1] @ A[1] @ A[0]
    assert np.allclose(evaluate_poly(p, A), expected)
    assert np.allclose(evaluate_poly(p, A, "adjoint"), expected.conj().T)


def test_apply_poly_adjoint(rng):
    A = _mats(rng, 3, 4)
    p = random_ncpoly(3, 3, rng)
    X = rng.standard_normal((4, 2))
    assert np.allclose(apply_poly(p, A, X, "adjoint"), evaluate_poly(p, A).conj().T @ X)
    assert np.allclose(apply_poly(p, A, X), evaluate_poly(p, A) @ X)


def test_multiplication_is_homomorphism(rng):
    A = _mats(rng, 2, 3)
    p, q = random_ncpoly(2, 2, rng), random_ncpoly(2, 2, rng)
    assert np.allclose(evaluate_poly(p * q, A), evaluate_poly(p, A) @ evaluate_poly(q, A))
    assert poly_arith("add", p, poly_arith("scale", p, -1)).is_zero


def test_radial_dilate_and_norm():
    p = parse_ncpoly("1 + Z1 + Z1*Z1", 1)
    r = radial_dilate(p, 0.5)
    assert r.coeffs[Word((1, 1), 1)] == 0.25
    assert coeff_l2_norm(r) == pytest.approx(np.sqrt(1 + 0.25 + 0.0625))
    with pytest.raises(OutOfRange):
        radial_dilate(p, 1.5)


def test_alphabet_mismatch():
    with pytest.raises(AlphabetMismatch):
        NcPoly.generator(1, 1) + NcPoly.generator(1, 2)


coeff = st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False)
words = st.lists(st.integers(1, 3), max_size=4).map(tuple)


@settings(max_examples=60, deadline=None)
@given(st.dictionaries(words, coeff, max_size=6))
def test_render_parse_roundtrip(terms):
    p = NcPoly(3, {Word(w, 3): c for w, c in terms.items()})
    assert parse_ncpoly(render(p), 3) == p


@settings(max_examples=40, deadline=None)
@given(st.dictionaries(words, coeff, max_size=4), st.dictionaries(words, coeff, max_size=4))
def test_addition_commutes(a, b):
    p = NcPoly(3, {Word(w, 3): c for w, c in a.items()})
    q = NcPoly(3, {Word(w, 3): c for w, c in b.items()})
    assert render(p + q) == render(q + p)
