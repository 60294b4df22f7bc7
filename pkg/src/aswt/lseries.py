"""L*(psi, s), L(psi, s) and truncations of C*(psi, s) = prod_j L*(psi, q^j s)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .cyclotomic import CycInt, exact_div_by_int, format_rational, ord_q, pi_valuation
from .errors import OracleViolation
from .expsums import ExpSumTable, TowerSpec, exp_sum_table, nondegenerate, psi_frob0

__all__ = [
    "LPolynomial",
    "CStarTruncation",
    "lstar_from_sums",
    "l_from_lstar",
    "cstar_truncated",
    "compute_lstar",
    "compute_l",
    "endpoint_holds",
]


@dataclass
class LPolynomial:
    """1 + c_1 s + ... + c_d s^d with coefficients in Z[zeta_{p^m}]."""

    p: int
    m: int
    a: int
    coeffs: list[CycInt]
    d: int
    nondegenerate: bool = True
    degree_confirmed: bool = False
    tail: list[CycInt] = field(default_factory=list)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def valuations(self) -> list:
        """ord_q of each coefficient (inf for zero)."""
        return [ord_q(c, self.a) for c in self.coeffs]

    def scaled(self, factor: int) -> LPolynomial:
        """The polynomial P(factor * s)."""
        coeffs = [c * factor**n for n, c in enumerate(self.coeffs)]
        return LPolynomial(self.p, self.m, self.a, coeffs, self.d, self.nondegenerate, self.degree_confirmed)

    def to_json(self) -> dict:
        from .polygon import polygon_of

        poly = polygon_of(self)
        return {
            "p": self.p,
            "m": self.m,
            "a": self.a,
            "degree": self.degree,
            "expected_degree": self.d,
            "nondegenerate": self.nondegenerate,
            "degree_confirmed": self.degree_confirmed,
            "coeffs": [c.to_json()["coeffs"] for c in self.coeffs],
            "slopes": [format_rational(s) for s in poly.slopes],
        }


def lstar_from_sums(sums: ExpSumTable, d: int, p: int, a: int, nondeg: bool = True) -> LPolynomial:
    """Newton's identities n c_n = sum_{k<=n} S*(k) c_{n-k}, exact at every step."""
    m = sums.m
    top = d + 2
    missing = [k for k in range(1, top + 1) if k not in sums.sums]
    if missing:
        raise ValueError(f"exponential sums missing for k = {missing}")
    coeffs = [CycInt.one(p, m)]
    for n in range(1, top + 1):
        acc = CycInt.zero(p, m)
        for k in range(1, n + 1):
            acc = acc + sums.sums[k] * coeffs[n - k]
        try:
            coeffs.append(exact_div_by_int(acc, n))
        except ArithmeticError as exc:
            raise OracleViolation(f"L* coefficient c_{n} is not integral: {exc}") from exc
    tail = coeffs[d + 1 :]
    body = coeffs[: d + 1]
    vanishing_tail = all(c.is_zero() for c in tail)
    if nondeg and not vanishing_tail:
        raise OracleViolation(f"degree oracle: L* has nonzero coefficients beyond degree {d}")
    if not nondeg:
        while len(body) > 1 and body[-1].is_zero():
            body.pop()
    return LPolynomial(p, m, a, body, d, nondeg, nondeg and vanishing_tail, tail)


def endpoint_holds(lstar: LPolynomial) -> bool:
    """ord_q(c_d) = (d - 1)/2."""
    return ord_q(lstar.coeffs[lstar.d], lstar.a) == Fraction(lstar.d - 1, 2)


def l_from_lstar(lstar: LPolynomial, frob0: CycInt) -> LPolynomial:
    """Exact quotient L*(s) / (1 - psi(Frob_0) s)."""
    out = [lstar.coeffs[0]]
    for c in lstar.coeffs[1:-1]:
        out.append(c + frob0 * out[-1])
    remainder = lstar.coeffs[-1] + frob0 * out[-1] if lstar.degree >= 1 else None
    if remainder is None or not remainder.is_zero():
        raise OracleViolation("L* is not divisible by (1 - psi(Frob_0) s)")
    return LPolynomial(lstar.p, lstar.m, lstar.a, out, lstar.d - 1, lstar.nondegenerate, lstar.degree_confirmed)


def compute_lstar(spec: TowerSpec, m: int, route: str = "galois", threads: int | None = None) -> LPolynomial:
    d = spec.d(m)
    table = exp_sum_table(spec, m, d + 2, route=route, threads=threads)
    return lstar_from_sums(table, d, spec.p, spec.a, nondegenerate(spec, m))


def compute_l(spec: TowerSpec, m: int, route: str = "galois", threads: int | None = None):
    """(L*, L) at conductor p^m."""
    lstar = compute_lstar(spec, m, route, threads)
    return lstar, l_from_lstar(lstar, psi_frob0(spec, m))


@dataclass
class CStarTruncation:
    """Coefficients of C*(psi, s) mod p^{N_p}, up to s^{N_s}, with trust flags."""

    p: int
    m: int
    a: int
    N_s: int
    N_p: int
    coeffs: list[CycInt]
    pi_orders: list
    trusted: list[bool]

    @property
    def cap(self) -> int:
        """Largest ord_pi that is certified (exclusive bound)."""
        return (self.N_p - 1) * (self.p - 1) * self.p ** (self.m - 1)

    def points(self, unit_exponent: int | None = None) -> list[tuple[int, object]]:
        """(n, ord) pairs for trusted coefficients, ord in units of pi^unit_exponent.

        The default unit is q, i.e. pi^{a (p-1) p^{m-1}}.
        """
        if unit_exponent is None:
            unit_exponent = self.a * (self.p - 1) * self.p ** (self.m - 1)
        out = []
        for n, (v, ok) in enumerate(zip(self.pi_orders, self.trusted)):
            if ok:
                out.append((n, Fraction(int(v), unit_exponent)))
        return out


def cstar_truncated(lstar: LPolynomial, N_s: int, N_p: int) -> CStarTruncation:
    p, a, m = lstar.p, lstar.a, lstar.m
    mod = p**N_p
    q = p**a
    J = -(-N_p // a)  # q^J = 0 mod p^{N_p}
    prod = [CycInt.one(p, m)] + [CycInt.zero(p, m)] * N_s
    for j in range(J):
        factor = [(c * q ** (j * n)).reduce_mod(mod) for n, c in enumerate(lstar.coeffs[: N_s + 1])]
        new = [CycInt.zero(p, m)] * (N_s + 1)
        for i, x in enumerate(prod):
            if x.is_zero():
                continue
            for n, y in enumerate(factor):
                if i + n > N_s:
                    break
                if not y.is_zero():
                    new[i + n] = new[i + n] + x * y
        prod = [c.reduce_mod(mod) for c in new]
    trunc = CStarTruncation(p, m, a, N_s, N_p, prod, [], [])
    for c in prod:
        v = pi_valuation(c)
        trunc.pi_orders.append(v)
        trunc.trusted.append(v != math.inf and v < trunc.cap)
    return trunc
