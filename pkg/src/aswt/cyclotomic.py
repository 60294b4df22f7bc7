"""Exact arithmetic in Z[zeta_{p^m}] and the valuations measured on it."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

__all__ = [
    "CycInt",
    "ValuationResult",
    "psi_char",
    "exact_div_by_int",
    "norm",
    "pi_valuation",
    "ord_p",
    "ord_q",
    "valuation",
    "v_p",
    "format_rational",
    "parse_rational",
]

INF = math.inf


def v_p(n: int, p: int) -> float:
    """p-adic order of an integer; +inf for 0."""
    if n == 0:
        return INF
    n = abs(n)
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def _phi(p: int, m: int) -> int:
    return (p - 1) * p ** (m - 1)


@dataclass(frozen=True)
class CycInt:
    """An element sum c_j zeta^j of Z[zeta_{p^m}], j < (p-1)p^{m-1}."""

    p: int
    m: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != _phi(self.p, self.m):
            raise ValueError(
                f"Z[zeta_{self.p}^{self.m}] needs {_phi(self.p, self.m)} coefficients, got {len(self.coeffs)}"
            )

    # construction ---------------------------------------------------------

    @classmethod
    def from_int(cls, p: int, m: int, value: int) -> CycInt:
        return cls(p, m, (value,) + (0,) * (_phi(p, m) - 1))

    @classmethod
    def zero(cls, p: int, m: int) -> CycInt:
        return cls.from_int(p, m, 0)

    @classmethod
    def one(cls, p: int, m: int) -> CycInt:
        return cls.from_int(p, m, 1)

    @classmethod
    def from_cyclic(cls, p: int, m: int, vec) -> CycInt:
        """Reduce a vector indexed by exponents mod p^m (length p^m) into the power basis."""
        phi = _phi(p, m)
        step = p ** (m - 1)
        out = [int(c) for c in vec[:phi]]
        for e in range(phi, p**m):
            c = int(vec[e])
            if c:
                r = e - phi
                for j in range(p - 1):
                    out[r + j * step] -= c
        return cls(p, m, tuple(out))

    @classmethod
    def from_counts(cls, p: int, m: int, counts) -> CycInt:
        """sum_c counts[c] zeta^c for c in Z/p^m."""
        return cls.from_cyclic(p, m, list(counts))

    @property
    def phi(self) -> int:
        return _phi(self.p, self.m)

    # arithmetic -------------------------------------------------------------

    def _same(self, other: CycInt) -> None:
        if (self.p, self.m) != (other.p, other.m):
            raise ValueError("elements of different cyclotomic rings")

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __add__(self, other):
        if isinstance(other, int):
            other = CycInt.from_int(self.p, self.m, other)
        self._same(other)
        return CycInt(self.p, self.m, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CycInt(self.p, self.m, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        if isinstance(other, int):
            other = CycInt.from_int(self.p, self.m, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return CycInt(self.p, self.m, tuple(a * other for a in self.coeffs))
        self._same(other)
        N = self.p**self.m
        vec = [0] * N
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(other.coeffs):
                    if y:
                        vec[(i + j) % N] += x * y
        return CycInt.from_cyclic(self.p, self.m, vec)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        result = CycInt.one(self.p, self.m)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def reduce_mod(self, modulus: int) -> CycInt:
        return CycInt(self.p, self.m, tuple(c % modulus for c in self.coeffs))

    def galois(self, u: int) -> CycInt:
        """Apply zeta -> zeta^u (u prime to p)."""
        if u % self.p == 0:
            raise ValueError("u must be prime to p")
        N = self.p**self.m
        vec = [0] * N
        for j, c in enumerate(self.coeffs):
            vec[(j * u) % N] += c
        return CycInt.from_cyclic(self.p, self.m, vec)

    def to_json(self) -> dict:
        return {"p": self.p, "m": self.m, "coeffs": list(self.coeffs)}

    @classmethod
    def from_json(cls, data: dict) -> CycInt:
        return cls(int(data["p"]), int(data["m"]), tuple(int(c) for c in data["coeffs"]))

    def __repr__(self) -> str:
        terms = []
        for j, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if j == 0 else f"{c}*z^{j}")
        return " + ".join(terms) if terms else "0"


def psi_char(p: int, m: int, c: int) -> CycInt:
    """zeta^c for the standard primitive character psi(1) = zeta of conductor p^m."""
    N = p**m
    vec = [0] * N
    vec[c % N] = 1
    return CycInt.from_cyclic(p, m, vec)


def exact_div_by_int(alpha: CycInt, n: int) -> CycInt:
    out = []
    for c in alpha.coeffs:
        q, r = divmod(c, n)
        if r:
            raise ArithmeticError(f"{alpha} is not divisible by {n}")
        out.append(q)
    return CycInt(alpha.p, alpha.m, tuple(out))


def _bareiss_det(mat: list[list[int]]) -> int:
    a = [row[:] for row in mat]
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def norm(alpha: CycInt) -> int:
    """N(alpha) = Res(Phi_{p^m}, alpha(x)), as the determinant of multiplication by alpha."""
    p, m = alpha.p, alpha.m
    phi = alpha.phi
    cols = []
    for j in range(phi):
        cols.append((alpha * psi_char(p, m, j)).coeffs)
    mat = [[cols[j][i] for j in range(phi)] for i in range(phi)]
    return _bareiss_det(mat)


def pi_valuation(alpha: CycInt) -> float:
    """ord_pi with ord_pi(zeta - 1) = 1; +inf for zero."""
    if alpha.is_zero():
        return INF
    # strip common powers of p first; each contributes phi
    g = 0
    for c in alpha.coeffs:
        g = math.gcd(g, c)
    k = int(v_p(g, alpha.p))
    if k:
        alpha = CycInt(alpha.p, alpha.m, tuple(c // alpha.p**k for c in alpha.coeffs))
    return k * alpha.phi + int(v_p(norm(alpha), alpha.p))


def ord_p(alpha: CycInt):
    v = pi_valuation(alpha)
    return v if v == INF else Fraction(int(v), alpha.phi)


def ord_q(alpha: CycInt, a: int):
    v = pi_valuation(alpha)
    return v if v == INF else Fraction(int(v), a * alpha.phi)


class ValuationResult(NamedTuple):
    value: object  # Fraction, int or math.inf
    scale: str  # "pi", "p" or "q"


def valuation(alpha: CycInt, scale: str = "pi", a: int = 1) -> ValuationResult:
    if scale == "pi":
        return ValuationResult(pi_valuation(alpha), "pi")
    if scale == "p":
        return ValuationResult(ord_p(alpha), "p")
    if scale == "q":
        return ValuationResult(ord_q(alpha, a), "q")
    raise ValueError(f"unknown valuation scale {scale!r}")


def format_rational(x) -> str:
    if x == INF:
        return "inf"
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(s: str):
    if s == "inf":
        return INF
    num, den = s.split("/")
    return Fraction(int(num), int(den))
