from __future__ import annotations

import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from aswt.cyclotomic import (
    CycInt,
    exact_div_by_int,
    format_rational,
    norm,
    ord_p,
    ord_q,
    parse_rational,
    pi_valuation,
    psi_char,
    valuation,
)

LEVELS = [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1)]


def sympy_norm(alpha: CycInt) -> int:
    """Res(Phi_{p^m}, alpha(x)) computed by sympy."""
    x = sympy.Symbol("x")
    phi_poly = sympy.cyclotomic_poly(alpha.p**alpha.m, x)
    a_poly = sum(c * x**j for j, c in enumerate(alpha.coeffs))
    return int(sympy.resultant(phi_poly, a_poly, x))


def zeta(p, m):
    return psi_char(p, m, 1)


def test_character_examples():
    assert psi_char(2, 1, 0) == CycInt.one(2, 1)
    assert psi_char(2, 1, 1) == CycInt.from_int(2, 1, -1)
    assert psi_char(2, 2, 3) == -zeta(2, 2)


def test_arithmetic_examples():
    z = zeta(2, 2)
    assert (1 + z) * (1 - z) == CycInt.from_int(2, 2, 2)
    alpha = CycInt(2, 2, (2, 4))
    assert alpha * CycInt.one(2, 2) == alpha
    assert exact_div_by_int(alpha, 2) == CycInt(2, 2, (1, 2))
    with pytest.raises(ArithmeticError):
        exact_div_by_int(CycInt(2, 2, (1, 2)), 2)


def test_wrong_length_rejected():
    with pytest.raises(ValueError):
        CycInt(2, 2, (1, 2, 3))


@pytest.mark.parametrize("p,m", LEVELS)
def test_basic_valuations(p, m):
    phi = (p - 1) * p ** (m - 1)
    assert pi_valuation(CycInt.from_int(p, m, p)) == phi
    assert pi_valuation(zeta(p, m) - 1) == 1
    assert pi_valuation(CycInt.one(p, m)) == 0
    assert pi_valuation(CycInt.zero(p, m)) == math.inf


def test_scaled_valuations():
    assert ord_q(CycInt.from_int(2, 1, 2), 1) == 1
    assert ord_q(CycInt.from_int(2, 2, 4), 2) == 1
    assert ord_q(zeta(2, 2) - 1, 1) == Fraction(1, 2)
    assert ord_p(zeta(3, 2) - 1) == Fraction(1, 6)
    assert valuation(zeta(2, 2) - 1, "q", 1) == (Fraction(1, 2), "q")
    with pytest.raises(ValueError):
        valuation(zeta(2, 2), "x")


def test_rational_formatting_round_trip():
    assert format_rational(Fraction(3, 1)) == "3/1"
    assert format_rational(math.inf) == "inf"
    assert parse_rational("5/8") == Fraction(5, 8)
    assert parse_rational("inf") == math.inf


@st.composite
def cyc_elements(draw, count=2):
    p, m = draw(st.sampled_from(LEVELS))
    phi = (p - 1) * p ** (m - 1)
    coeff = st.lists(st.integers(-20, 20), min_size=phi, max_size=phi)
    return p, m, [CycInt(p, m, tuple(draw(coeff))) for _ in range(count)]


@given(cyc_elements(count=1))
def test_norm_matches_resultant(data):
    _, _, (alpha,) = data
    assert norm(alpha) == sympy_norm(alpha)


@given(cyc_elements())
def test_valuation_is_additive_and_ultrametric(data):
    p, m, (a, b) = data
    if a.is_zero() or b.is_zero():
        return
    assert pi_valuation(a * b) == pi_valuation(a) + pi_valuation(b)
    assert pi_valuation(a + b) >= min(pi_valuation(a), pi_valuation(b))


@given(cyc_elements(count=1), st.integers(1, 50))
def test_galois_action_preserves_valuation_and_is_a_homomorphism(data, u):
    p, m, (a,) = data
    if u % p == 0:
        u += 1
    assert pi_valuation(a.galois(u)) == pi_valuation(a)
    b = zeta(p, m) + 3
    assert (a * b).galois(u) == a.galois(u) * b.galois(u)


def test_json_round_trip():
    a = CycInt(3, 2, (1, -2, 3, 0, 5, 6))
    assert CycInt.from_json(a.to_json()) == a
