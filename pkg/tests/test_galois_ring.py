from __future__ import annotations

import itertools

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from aswt.expsums import TowerSpec
from aswt.galois_ring import embed, eval_fhat, field_ctx, gr_construct


def lexicographic_first_irreducible(p: int, n: int) -> tuple[int, ...]:
    """Independent scan with sympy's irreducibility test; tuples are (c_0, ..., c_{n-1}, 1)."""
    x = sympy.Symbol("x")
    for low in itertools.product(range(p), repeat=n):
        coeffs = list(low) + [1]
        poly = sympy.Poly(list(reversed(coeffs)), x, modulus=p)
        if poly.is_irreducible:
            return tuple(coeffs)
    raise AssertionError("no irreducible polynomial found")


@pytest.mark.parametrize("p,n", [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (5, 2), (2, 6)])
def test_canonical_modulus_matches_independent_scan(p, n):
    assert field_ctx(p, n).modulus == lexicographic_first_irreducible(p, n)


def test_modulus_examples():
    assert gr_construct(2, 2, 2).modulus == (1, 1, 1)
    assert field_ctx(3, 2).modulus == (1, 0, 1)
    ring = gr_construct(2, 3, 1)
    assert ring(5) * ring(3) == ring(15 % 8)


def test_teichmuller_examples():
    ring = gr_construct(2, 2, 2)
    F = ring.field
    assert ring.teichmuller(F.zero) == ring.zero
    assert ring.teichmuller(F.one) == ring.one
    assert ring.teichmuller(F.gen()) == ring.gen()
    assert gr_construct(3, 2, 1).teichmuller(field_ctx(3, 1)(2)) == gr_construct(3, 2, 1)(8)


def test_frobenius_and_trace_examples():
    ring = gr_construct(2, 2, 2)
    x = ring.gen()
    assert ring.frobenius(x) == ring((3, 3))
    assert ring.trace(x) == 3
    assert ring.trace(ring.one) == 2
    assert ring.frobenius(ring(3)) == ring(3)


RINGS = st.sampled_from([(2, 2, 2), (2, 3, 3), (3, 2, 2), (2, 4, 2), (5, 2, 2), (3, 3, 3)])


@st.composite
def ring_elements(draw, count=2):
    p, m, n = draw(RINGS)
    ring = gr_construct(p, m, n)
    coeff = st.lists(st.integers(0, p**m - 1), min_size=n, max_size=n)
    return ring, [ring(tuple(draw(coeff))) for _ in range(count)]


@given(ring_elements())
def test_frobenius_is_a_ring_automorphism_of_order_n(data):
    ring, (a, b) = data
    F = ring.frobenius
    assert F(a + b) == F(a) + F(b)
    assert F(a * b) == F(a) * F(b)
    c = a
    for _ in range(ring.n):
        c = F(c)
    assert c == a


@given(ring_elements())
def test_matrix_frobenius_agrees_with_digit_frobenius(data):
    ring, (a, _) = data
    assert ring.apply_frobenius(a) == ring.frobenius(a)
    assert ring.apply_frobenius(a, 2) == ring.frobenius(ring.frobenius(a))


@given(ring_elements())
def test_trace_properties(data):
    ring, (a, b) = data
    mod = ring.p**ring.m
    assert ring.trace(ring.frobenius(a)) == ring.trace(a)
    assert ring.trace(a + b) == (ring.trace(a) + ring.trace(b)) % mod
    assert ring.fast_trace(a) == ring.trace(a)


@given(ring_elements())
def test_teichmuller_is_multiplicative_and_fixed(data):
    ring, (a, b) = data
    ta = ring.teichmuller(ring.residue(a))
    tb = ring.teichmuller(ring.residue(b))
    assert ring.residue(ta) == ring.residue(a)
    assert ta ** (ring.p**ring.n) == ta
    assert ring.teichmuller(ring.residue(a * b)) == ta * tb


def test_teichmuller_satisfies_independent_polynomial_identity():
    # t^{p^n} - t computed with sympy polynomial arithmetic mod (p^m, modulus)
    p, m, n = 3, 3, 2
    ring = gr_construct(p, m, n)
    x = sympy.Symbol("x")
    modulus = sympy.Poly(list(reversed(ring.modulus)), x)
    for r in ring.field.nonzero_elements():
        t = ring.teichmuller(r)
        poly = sympy.Poly(list(reversed(t.coeffs)), x)
        power = sympy.Poly(1, x)
        for _ in range(p**n):
            power = (power * poly).rem(modulus)
            power = sympy.Poly([c % p**m for c in power.all_coeffs()], x)
        assert [int(c) for c in reversed(power.all_coeffs())] + [0] * (n - len(power.all_coeffs())) == list(t.coeffs)


def test_embedding_examples():
    F2, F4, F16 = field_ctx(2, 1), field_ctx(2, 2), field_ctx(2, 4)
    assert embed(F2, F16)(F2.one) == F16.one
    assert embed(F4, F4).image == F4.gen()
    with pytest.raises(ValueError):
        embed(field_ctx(2, 3), F16)


@pytest.mark.parametrize("root_index", [0, 1])
def test_embedding_is_compatible_with_trace(root_index):
    F4, F16 = field_ctx(2, 2), field_ctx(2, 4)
    emb = embed(F4, F16, root_index)
    for a in F4.elements():
        b = emb(a)
        tr16 = sum((b ** (2**j) for j in range(4)), F16.zero)
        tr4 = sum((a ** (2**j) for j in range(2)), F4.zero)
        # Tr_{F16/F2} restricted to F4 is twice Tr_{F4/F2}, which vanishes in characteristic 2
        assert tr16 == emb(tr4 + tr4)


def test_eval_fhat_examples():
    cubic = TowerSpec(2, 1, {0: (0, 0, 0, 1)})
    assert eval_fhat(cubic, 1, gr_construct(2, 1, 1).one) == gr_construct(2, 1, 1).one
    assert eval_fhat(cubic, 2, gr_construct(2, 2, 1).one) == gr_construct(2, 2, 1).one
    spec = TowerSpec(2, 1, {0: (0, 1), 1: (0, 1)})
    ring = gr_construct(2, 2, 2)
    t = ring.teichmuller(ring.field.gen())
    assert eval_fhat(spec, 2, t) == t + t * 2
