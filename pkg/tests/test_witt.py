from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from aswt.expsums import TowerSpec
from aswt.galois_ring import field_ctx
from aswt.witt import (
    FieldPoly,
    WittVec,
    _reduced,
    build_fm,
    build_structure_polys,
    field_witt,
    nu_to_zmod,
    witt_add,
    witt_frobenius,
    witt_mul,
    witt_trace,
)

X0, X1, Y0, Y1 = (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)


def mono(*pairs):
    exps = [0, 0, 0, 0]
    for var, e in pairs:
        exps[var.index(1)] += e
    return tuple(exps)


def test_length_one_sum_is_plain_addition():
    polys = build_structure_polys(2, 1)
    assert polys.sum_polys[0] == {(1, 0): 1, (0, 1): 1}


def test_p2_second_sum_polynomial():
    polys = build_structure_polys(2, 2)
    # over Z the cross term is -X0*Y0; it is +X0*Y0 once reduced mod 2
    assert polys.sum_polys[1] == {X1: 1, Y1: 1, mono((X0, 1), (Y0, 1)): -1}
    reduced = dict(_reduced(polys)[0][1])
    assert reduced == {X1: 1, Y1: 1, mono((X0, 1), (Y0, 1)): 1}


def test_p3_second_sum_polynomial():
    polys = build_structure_polys(3, 2)
    expected = {X1: 1, Y1: 1, mono((X0, 2), (Y0, 1)): -1, mono((X0, 1), (Y0, 2)): -1}
    assert polys.sum_polys[1] == expected


@pytest.mark.parametrize("p,m", [(2, 1), (2, 2), (2, 3), (3, 2), (3, 3), (2, 4), (5, 2)])
def test_ghost_identities(p, m):
    assert build_structure_polys(p, m).ghost_identity_holds()


def test_length_cap():
    with pytest.raises(ValueError):
        build_structure_polys(2, 5)


def test_dump_lists_every_polynomial():
    text = build_structure_polys(2, 2).format()
    assert text.count("\nS") == 2 and text.count("\nP") == 2


F2 = field_ctx(2, 1)
F4 = field_ctx(2, 2)


def test_carry_in_length_two():
    polys = build_structure_polys(2, 2)
    one = field_witt(F2, (1, 0))
    assert witt_add(one, one, polys) == field_witt(F2, (0, 1))
    assert witt_mul(one, one, polys) == one


def test_mismatched_lengths_rejected():
    polys = build_structure_polys(2, 2)
    with pytest.raises(ValueError):
        witt_add(field_witt(F2, (1,)), field_witt(F2, (1, 0)), polys)


def test_frobenius_examples():
    g = F4.gen()
    assert witt_frobenius(WittVec((g, F4.zero))) == WittVec((g**2, F4.zero))
    u = field_witt(F2, (1, 1))
    assert witt_frobenius(u) == u
    x = FieldPoly(F2, [0, 1])
    assert witt_frobenius(WittVec((x, x * x)), 2) == WittVec((x * x, x**4))


def test_trace_examples():
    polys1 = build_structure_polys(2, 1)
    g = F4.gen()
    assert witt_trace(WittVec((g,)), 2, polys1) == WittVec((F4.one,))
    w = field_witt(F2, (1,))
    assert witt_trace(w, 1, polys1) == w
    zero = field_witt(F4, (0, 0))
    assert witt_trace(zero, 2, build_structure_polys(2, 2)) == zero


def test_nu_examples():
    assert nu_to_zmod(field_witt(F2, (1, 1)), 2) == 3
    assert nu_to_zmod(field_witt(field_ctx(3, 1), (2, 0)), 3) == 8
    assert nu_to_zmod(field_witt(F2, (0, 0)), 2) == 0


def test_fm_examples():
    spec = TowerSpec(2, 1, {0: (0, 0, 0, 1)})
    fm = build_fm(spec, 2)
    assert fm.coords[0] == FieldPoly(F2, [0, 0, 0, 1]) and fm.coords[1].is_zero()
    spec = TowerSpec(2, 1, {0: (0, 1), 1: (0, 1)})
    fm = build_fm(spec, 2)
    assert fm.coords == (FieldPoly(F2, [0, 1]), FieldPoly(F2, [0, 1]))
    spec = TowerSpec(2, 1, {0: (0, 1, 1)})
    assert build_fm(spec, 1).coords == (FieldPoly(F2, [0, 1, 1]),)


# --- ring laws and the isomorphism W_m(F_p) = Z/p^m ----------------------------

PRIMES_LENGTHS = st.sampled_from([(2, 2), (2, 3), (3, 2), (3, 3), (5, 2)])


@st.composite
def witt_triples(draw):
    p, m = draw(PRIMES_LENGTHS)
    F = field_ctx(p, 1)
    vec = st.lists(st.integers(0, p - 1), min_size=m, max_size=m)
    return p, m, [field_witt(F, draw(vec)) for _ in range(3)]


@given(witt_triples())
def test_ring_laws(data):
    p, m, (u, v, w) = data
    polys = build_structure_polys(p, m)
    add = lambda a, b: witt_add(a, b, polys)  # noqa: E731
    mul = lambda a, b: witt_mul(a, b, polys)  # noqa: E731
    assert add(u, v) == add(v, u)
    assert mul(u, v) == mul(v, u)
    assert add(add(u, v), w) == add(u, add(v, w))
    assert mul(mul(u, v), w) == mul(u, mul(v, w))
    assert mul(u, add(v, w)) == add(mul(u, v), mul(u, w))
    zero = field_witt(field_ctx(p, 1), [0] * m)
    assert add(u, zero) == u


@given(witt_triples())
def test_nu_is_a_ring_isomorphism(data):
    p, m, (u, v, _) = data
    polys = build_structure_polys(p, m)
    mod = p**m
    assert nu_to_zmod(witt_add(u, v, polys), p) == (nu_to_zmod(u, p) + nu_to_zmod(v, p)) % mod
    assert nu_to_zmod(witt_mul(u, v, polys), p) == nu_to_zmod(u, p) * nu_to_zmod(v, p) % mod


@pytest.mark.parametrize("p,m", [(2, 2), (3, 2), (2, 3)])
def test_nu_is_bijective(p, m):
    F = field_ctx(p, 1)
    import itertools

    images = {nu_to_zmod(field_witt(F, c), p) for c in itertools.product(range(p), repeat=m)}
    assert images == set(range(p**m))


@given(st.lists(st.integers(0, 3), min_size=2, max_size=2), st.lists(st.integers(0, 3), min_size=2, max_size=2))
def test_frobenius_is_additive_over_f4(a, b):
    polys = build_structure_polys(2, 2)
    u = WittVec(tuple(F4(x) for x in a))
    v = WittVec(tuple(F4(x) for x in b))
    assert witt_frobenius(witt_add(u, v, polys)) == witt_add(witt_frobenius(u), witt_frobenius(v), polys)
