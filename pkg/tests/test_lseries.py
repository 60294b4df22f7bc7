from __future__ import annotations

from fractions import Fraction

import pytest

from aswt.cyclotomic import CycInt, ord_q, psi_char
from aswt.errors import OracleViolation
from aswt.expsums import ExpSumTable, TowerSpec
from aswt.lseries import (
    LPolynomial,
    compute_l,
    compute_lstar,
    cstar_truncated,
    endpoint_holds,
    l_from_lstar,
    lstar_from_sums,
)
from aswt.polygon import newton_polygon
from towers import cubic, two_row


def ints(values, p=2, m=1):
    return [CycInt.from_int(p, m, v) for v in values]


def table(values, p=2, m=1):
    return ExpSumTable(m, {k + 1: CycInt.from_int(p, m, v) for k, v in enumerate(values)})


def test_newton_recurrence_by_hand():
    # S = (-1, 3, -1) and the degree oracle needs S_4, S_5 of the same curve
    lstar = lstar_from_sums(table([-1, 3, -1, -9, -1]), 3, 2, 1)
    assert lstar.coeffs == ints([1, -1, 2, -2])
    assert lstar.degree_confirmed and endpoint_holds(lstar)


def test_linear_tower_gives_degree_one():
    spec = TowerSpec(3, 1, {0: (0, 1)})
    lstar = compute_lstar(spec, 1)
    # S_1 = zeta + zeta^2 = -1, so L* = 1 + S_1 s
    assert lstar.coeffs == ints([1, -1], 3)


def test_zero_first_sum_gives_zero_first_coefficient():
    lstar = lstar_from_sums(table([0, 0, 0]), 1, 2, 1, nondeg=False)
    assert lstar.coeffs == ints([1])


def test_non_integral_coefficient_is_an_oracle_violation():
    with pytest.raises(OracleViolation):
        lstar_from_sums(table([0, 1, 0]), 1, 2, 1, nondeg=False)


def test_degree_oracle_violation():
    with pytest.raises(OracleViolation):
        lstar_from_sums(table([-1, 3, -1, -9, -1]), 2, 2, 1)


def test_quotient_examples():
    lstar = LPolynomial(2, 1, 1, ints([1, -1, 2, -2]), 3)
    assert l_from_lstar(lstar, CycInt.one(2, 1)).coeffs == ints([1, 0, 2])
    assert l_from_lstar(LPolynomial(2, 1, 1, ints([1, -1]), 1), CycInt.one(2, 1)).coeffs == ints([1])
    with pytest.raises(OracleViolation):
        l_from_lstar(lstar, CycInt.from_int(2, 1, -1))


def test_quotient_keeps_constant_term_with_nontrivial_frobenius_value():
    z = psi_char(2, 2, 1)
    lstar = LPolynomial(2, 2, 1, [CycInt.one(2, 2), -z - 1, z], 2)
    lpoly = l_from_lstar(lstar, z)
    assert lpoly.coeffs[0] == CycInt.one(2, 2)


def count_points(k: int) -> int:
    """Affine solutions of y^2 - y = x^3 over F_{2^k}, by exhaustion."""
    from test_expsums import gf2_mul

    total = 0
    for x in range(2**k):
        x3 = gf2_mul(gf2_mul(x, x, k), x, k)
        total += sum(1 for y in range(2**k) if gf2_mul(y, y, k) ^ y == x3)
    return total


def l_from_point_counts(kmax: int) -> list[Fraction]:
    """(1 - 2s) exp(sum_k N_k s^k / k) truncated at s^kmax.

    N_k = q^k + 1 + S*(k), so this is L*(s) / (1 - s) = L(s).
    """
    logs = [Fraction(0)] + [Fraction(count_points(k), k) for k in range(1, kmax + 1)]
    exp = [Fraction(1)] + [Fraction(0)] * kmax
    for n in range(1, kmax + 1):
        exp[n] = sum(k * logs[k] * exp[n - k] for k in range(1, n + 1)) / n
    return [exp[n] - 2 * exp[n - 1] if n else exp[0] for n in range(kmax + 1)]


def test_point_counts_give_the_same_lstar():
    counted = l_from_point_counts(3)
    _, lpoly = compute_l(cubic(), 1)
    assert counted == [Fraction(1), Fraction(0), Fraction(2), Fraction(0)]
    assert lpoly.coeffs == ints([1, 0, 2])


def test_cstar_linear_coefficient():
    lstar = compute_lstar(cubic(), 1)
    N_p = 6
    trunc = cstar_truncated(lstar, 4, N_p)
    geometric = sum(2**j for j in range(N_p)) % 2**N_p
    assert trunc.coeffs[1] == (lstar.coeffs[1] * geometric).reduce_mod(2**N_p)
    assert trunc.coeffs[0] == CycInt.one(2, 1)


def test_cstar_slopes_for_cubic():
    trunc = cstar_truncated(compute_lstar(cubic(), 1), 7, 12)
    poly = newton_polygon(trunc.points())
    assert poly.slopes[:7] == [Fraction(0), Fraction(1, 2), Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(3, 2), Fraction(2)]


def test_cstar_trust_cap_excludes_noise():
    trunc = cstar_truncated(compute_lstar(cubic(), 1), 7, 3)
    assert trunc.cap == 2
    for v, ok in zip(trunc.pi_orders, trunc.trusted):
        assert ok == (v < 2)


def test_scaled_polynomial_shifts_valuations():
    lstar = compute_lstar(two_row(), 2)
    scaled = lstar.scaled(2)
    for n, (a, b) in enumerate(zip(lstar.valuations(), scaled.valuations())):
        assert b == a + n


@pytest.mark.parametrize("m", [2, 3])
def test_two_row_endpoint_and_degree(m):
    lstar, lpoly = compute_l(two_row(), m)
    assert lstar.degree == two_row().d(m) and lstar.degree_confirmed
    assert endpoint_holds(lstar)
    assert lpoly.degree == lstar.degree - 1
    assert ord_q(lstar.coeffs[-1], 1) == Fraction(lstar.degree - 1, 2)
