from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from aswt.cyclotomic import CycInt
from aswt.lseries import LPolynomial, compute_l, compute_lstar, cstar_truncated
from aswt.polygon import (
    BoundLines,
    check_bounds,
    newton_polygon,
    polygon_of,
    predicted_slopes,
    slopes_csv,
    verify_stability,
)
from towers import cubic, two_row

F = Fraction


def brute_hull_height(points, x):
    """min over chords through (x, .) of the interpolated height."""
    best = math.inf
    for x0, y0 in points:
        for x1, y1 in points:
            if x0 <= x <= x1 and x0 < x1:
                best = min(best, y0 + (y1 - y0) * F(x - x0, x1 - x0))
            elif x0 == x1 == x:
                best = min(best, y0)
    return best


def test_polygon_examples():
    assert newton_polygon([(0, 0), (1, 0), (2, 1)]).slopes == [0, 1]
    poly = newton_polygon([(0, 0), (1, 1), (2, 1)])
    assert poly.vertices == [(0, 0), (2, 1)]
    assert poly.slopes == [F(1, 2), F(1, 2)]
    with pytest.raises(ValueError):
        newton_polygon([(1, 0), (2, 1)])


def test_infinite_points_are_skipped():
    poly = newton_polygon([(0, 0), (1, math.inf), (2, 1)])
    assert poly.slopes == [F(1, 2), F(1, 2)]


@given(st.lists(st.tuples(st.integers(0, 12), st.fractions(0, 10, max_denominator=6)), min_size=1, max_size=10))
def test_hull_matches_brute_force(raw):
    pts = {0: F(0)}
    for x, y in raw:
        pts[x] = min(pts.get(x, y), y)
    points = sorted(pts.items())
    poly = newton_polygon(points)
    for x in range(poly.length + 1):
        assert poly.value_at(x) == brute_hull_height(points, x)
    assert poly.slopes == sorted(poly.slopes)
    assert len(poly.slopes) == poly.length


def test_cubic_polygons():
    lstar, lpoly = compute_l(cubic(), 1)
    assert polygon_of(lpoly).slopes == [F(1, 2), F(1, 2)]
    assert polygon_of(lstar).slopes == [0, F(1, 2), F(1, 2)]


def test_degree_one_polygon_and_shift():
    lp = LPolynomial(2, 1, 1, [CycInt.one(2, 1), CycInt.from_int(2, 1, 4)], 1)
    assert polygon_of(lp).slopes == [2]
    lstar = compute_lstar(two_row(), 2)
    base = polygon_of(lstar).slopes
    assert polygon_of(lstar.scaled(2)).slopes == [s + 1 for s in base]


@given(st.integers(1, 4))
def test_rescaling_multiplies_slopes(k):
    # measuring in units of pi^{E/k} multiplies every slope by k
    lstar = compute_lstar(two_row(), 2)
    E = 2
    base = polygon_of(lstar, E * k).slopes
    assert polygon_of(lstar, E).slopes == [s * k for s in base]


def test_bound_lines():
    lines = BoundLines(3)
    # vertices (0,0) (1,0) (3,1) (4,2) (6,5) (7,7)
    assert [lines.upper(x) for x in range(8)] == [0, 0, F(1, 2), 1, 2, F(7, 2), 5, 7]
    assert lines.upper(3) == F(3 - 1, 2)
    assert lines.lower(0) == lines.lower(1) == 0
    assert lines.contact_points(7) == [0, 1, 3, 4, 6, 7]
    for d1 in (1, 2, 3, 6):
        lines = BoundLines(d1)
        for x in range(30):
            assert lines.lower(x) <= lines.upper(x)
        for x in lines.contact_points(30):
            assert lines.upper(x) == lines.lower(x)


def test_cubic_cstar_passes_bounds_and_touches_vertex():
    trunc = cstar_truncated(compute_lstar(cubic(), 1), 7, 12)
    result = check_bounds(trunc.points(), F(trunc.cap, 1), 3)
    assert result["pass"]
    contact = {c["n"]: c for c in result["contacts"]}
    assert contact[3]["polygon"] == "1/1"


def test_bound_violation_is_reported_with_abscissa():
    result = check_bounds([(0, F(0)), (1, F(0)), (2, F(0))], F(10), 3)
    assert not result["pass"]
    assert {v["n"] for v in result["violations"]} == {2}


def test_predicted_slopes():
    gam = [F(1, 2), F(1, 2)]
    assert predicted_slopes(gam, 2, 1, 1) == gam
    assert predicted_slopes(gam, 2, 2, 1) == [F(1, 4), F(1, 4), F(1, 2), F(3, 4), F(3, 4)]
    expected = [F(x, 8) for x in (1, 1, 2, 3, 3, 4, 5, 5, 6, 7, 7)]
    assert predicted_slopes(gam, 2, 3, 1) == expected


def test_slopes_csv():
    assert slopes_csv([F(1, 2), F(1, 2)]) == "num,den\n1,2\n1,2\n"


def test_cubic_stability():
    verdict = verify_stability(cubic(), [1, 2, 3])
    assert verdict.passed
    assert verdict.levels[2]["direct"] == ["1/4", "1/4", "1/2", "3/4", "3/4"]
    assert len(verdict.levels[3]["direct"]) == 11


def test_two_row_stability():
    verdict = verify_stability(two_row(), [2, 3])
    assert verdict.passed and verdict.m0 == 2 and verdict.m_tilde == 2
    with pytest.raises(ValueError):
        verify_stability(two_row(), [1])
