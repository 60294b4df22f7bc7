"""Newton polygons over exact rationals, the broken-line bounds, and the slope-stability check."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from .cyclotomic import format_rational
from .errors import PrecisionError
from .expsums import TowerSpec, nondegenerate, tower_constants

__all__ = [
    "NewtonPolygon",
    "BoundLines",
    "newton_polygon",
    "polygon_of",
    "check_bounds",
    "predicted_slopes",
    "verify_stability",
    "StabilityVerdict",
    "slopes_csv",
]

INF = math.inf


@dataclass
class NewtonPolygon:
    points: list[tuple[int, object]]
    vertices: list[tuple[int, Fraction]]
    slopes: list[Fraction]
    partial: bool = False

    @property
    def length(self) -> int:
        return self.vertices[-1][0]

    def value_at(self, x) -> Fraction:
        """Height of the hull at abscissa x (0 <= x <= length)."""
        vs = self.vertices
        if not vs[0][0] <= x <= vs[-1][0]:
            raise ValueError(f"abscissa {x} outside [{vs[0][0]}, {vs[-1][0]}]")
        for (x0, y0), (x1, y1) in zip(vs, vs[1:]):
            if x0 <= x <= x1:
                return y0 + (y1 - y0) * Fraction(x - x0, x1 - x0)
        return vs[0][1]

    def to_json(self) -> dict:
        return {
            "vertices": [[x, format_rational(y)] for x, y in self.vertices],
            "slopes": [format_rational(s) for s in self.slopes],
            "partial": self.partial,
        }


def _cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def newton_polygon(points, partial: bool = False) -> NewtonPolygon:
    """Lower convex hull of (n, v_n); points with v_n = inf are skipped."""
    pts = sorted((int(n), Fraction(v)) for n, v in points if v != INF)
    if not pts or pts[0][0] != 0:
        raise ValueError("the point at n = 0 is required")
    hull: list[tuple[int, Fraction]] = []
    for pt in pts:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], pt) <= 0:
            hull.pop()
        if hull and hull[-1][0] == pt[0]:
            if pt[1] < hull[-1][1]:
                hull[-1] = pt
            continue
        hull.append(pt)
    slopes: list[Fraction] = []
    for (x0, y0), (x1, y1) in zip(hull, hull[1:]):
        s = (y1 - y0) / (x1 - x0)
        slopes.extend([s] * (x1 - x0))
    return NewtonPolygon(list(points), hull, slopes, partial)


def polygon_of(lpoly, unit_exponent: int | None = None) -> NewtonPolygon:
    """Newton polygon of an LPolynomial.

    Valuations are q-adic by default; ``unit_exponent`` measures them in
    units of pi_psi^unit_exponent instead.
    """
    from .cyclotomic import pi_valuation

    if unit_exponent is None:
        unit_exponent = lpoly.a * (lpoly.p - 1) * lpoly.p ** (lpoly.m - 1)
    pts = []
    for n, c in enumerate(lpoly.coeffs):
        v = pi_valuation(c)
        pts.append((n, v if v == INF else Fraction(int(v), unit_exponent)))
    return newton_polygon(pts)


@dataclass(frozen=True)
class BoundLines:
    """Upper broken line through (n d1, n(n d1 - 1)/2), (n d1 + 1, n(n d1 + 1)/2) and lower line x(x-1)/(2 d1)."""

    delta1: int

    def upper(self, x: int) -> Fraction:
        d1 = self.delta1
        n, r = divmod(x, d1)
        base = Fraction(n * (n * d1 - 1), 2)
        if r == 0:
            return base
        return base + n + Fraction((r - 1) * (2 * n + 1), 2)

    def lower(self, x: int) -> Fraction:
        return Fraction(x * (x - 1), 2 * self.delta1)

    def contact_points(self, limit: int) -> list[int]:
        out = []
        n = 0
        while n * self.delta1 <= limit:
            for x in (n * self.delta1, n * self.delta1 + 1):
                if x <= limit and x not in out:
                    out.append(x)
            n += 1
        return out


def check_bounds(points, cap, delta1: int, upto: int | None = None) -> dict:
    """Compare a (possibly partial) C* polygon with the two broken lines on [0, upto].

    ``points`` are certified (n, ord) pairs; ``cap`` is the certified ord
    threshold in the same units.  An abscissa without a certified point is
    harmless when cap >= lower(n): every point then sits on or above the
    convex lower line, and the hull of a subset can only be higher, so a
    contact found on the subset hull is exact.  Abscissas where that fails
    are listed under ``uncertified``; they make ``certified`` false, which is
    kept apart from genuine bound violations.
    """
    lines = BoundLines(delta1)
    pts = dict(points)
    if 0 not in pts:
        raise PrecisionError("no certified coefficient: increase N_p")
    top = max(pts)
    if upto is None:
        upto = top
    poly = newton_polygon(sorted(pts.items()), partial=len(pts) != top + 1 or top < upto)
    violations = []
    uncertified = []
    for n in range(upto + 1):
        if n in pts:
            if pts[n] < lines.lower(n):
                violations.append({"n": n, "kind": "below_lower", "value": format_rational(pts[n])})
        elif cap < lines.lower(n):
            uncertified.append(n)
        if n <= top and poly.value_at(n) > lines.upper(n):
            violations.append({"n": n, "kind": "above_upper", "value": format_rational(poly.value_at(n))})
    contacts = []
    for x in lines.contact_points(upto):
        entry = {"n": x, "expected": format_rational(lines.upper(x))}
        if x <= top:
            entry["polygon"] = format_rational(poly.value_at(x))
            entry["ok"] = poly.value_at(x) == lines.upper(x)
        else:
            entry["polygon"] = None
            entry["ok"] = False
            uncertified.append(x)
        contacts.append(entry)
    uncertified = sorted(set(uncertified))
    bounds_ok = not violations and all(c["ok"] or c["polygon"] is None for c in contacts)
    return {
        "pass": bounds_ok and not uncertified,
        "bounds_hold": bounds_ok,
        "certified": not uncertified,
        "delta1": delta1,
        "checked_up_to": upto,
        "violations": violations,
        "uncertified": uncertified,
        "contacts": contacts,
        "polygon": poly.to_json(),
    }


def predicted_slopes(gammas, p: int, m: int, m0: int) -> list[Fraction]:
    """Union over i < p^{m-m0} of {i/P, (gamma_t + i)/P}, P = p^{m-m0}, minus one zero."""
    P = p ** (m - m0)
    out = []
    for i in range(P):
        out.append(Fraction(i, P))
        out.extend((Fraction(g) + i) / P for g in gammas)
    out.remove(Fraction(0))
    return sorted(out)


def slopes_csv(slopes) -> str:
    lines = ["num,den"]
    for s in slopes:
        s = Fraction(s)
        lines.append(f"{s.numerator},{s.denominator}")
    return "\n".join(lines) + "\n"


@dataclass
class StabilityVerdict:
    m0: int
    m_tilde: int
    delta1: int
    m0_clamped: bool
    gammas: list[Fraction]
    levels: dict = field(default_factory=dict)
    flags: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.levels) and all(v["pass"] for v in self.levels.values()) and not any(
            f.startswith("gamma_count") for f in self.flags
        )

    def to_json(self) -> dict:
        return {
            "pass": self.passed,
            "m0": self.m0,
            "m_tilde": self.m_tilde,
            "delta1": self.delta1,
            "m0_clamped": self.m0_clamped,
            "gammas": [format_rational(g) for g in self.gammas],
            "flags": list(self.flags),
            "levels": {str(m): v for m, v in sorted(self.levels.items())},
        }


def _multiset_diff(a, b) -> tuple[list, list]:
    ca, cb = Counter(a), Counter(b)
    return sorted((ca - cb).elements()), sorted((cb - ca).elements())


def verify_stability(spec: TowerSpec, m_range, route: str = "galois", threads: int | None = None) -> StabilityVerdict:
    """Check that L(psi, s) slopes at each level in ``m_range`` follow the progression rule from level m_0."""
    from .lseries import compute_l

    const = tower_constants(spec)
    m0 = const.m0
    levels = sorted(set(m_range))
    if not levels or levels[0] < m0:
        raise ValueError(f"levels must be at least m_0 = {m0}")
    verdict = StabilityVerdict(m0, const.m_tilde, const.delta1, const.m0_clamped, [])
    if const.m0_clamped:
        verdict.flags.append(f"m0_clamped: formula gave {const.m0_formula}, using m_tilde = {const.m_tilde}")
    cache = {}

    def slopes_at(m):
        if m not in cache:
            if not nondegenerate(spec, m):
                verdict.flags.append(f"degenerate_at_level_{m}")
            _, l = compute_l(spec, m, route, threads)
            cache[m] = polygon_of(l).slopes
        return cache[m]

    verdict.gammas = slopes_at(m0)
    expected_count = const.delta1 * spec.p ** (m0 - const.m_tilde) - 1
    if len(verdict.gammas) != expected_count:
        verdict.flags.append(f"gamma_count: expected {expected_count}, found {len(verdict.gammas)}")
    if any(not 0 < g < 1 for g in verdict.gammas):
        verdict.flags.append("gamma_range: some slope at level m0 is outside (0, 1)")
    for m in levels:
        direct = slopes_at(m)
        predicted = predicted_slopes(verdict.gammas, spec.p, m, m0)
        extra, missing = _multiset_diff(direct, predicted)
        verdict.levels[m] = {
            "pass": not extra and not missing,
            "direct": [format_rational(s) for s in direct],
            "predicted": [format_rational(s) for s in predicted],
            "only_direct": [format_rational(s) for s in extra],
            "only_predicted": [format_rational(s) for s in missing],
        }
    return verdict
