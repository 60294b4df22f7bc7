"""Truncated Witt vectors W_m(R) for rings R of characteristic p.

Structure polynomials come from the ghost-component recursion over the
integers and are evaluated in the coefficient ring after reducing their
coefficients mod p.  Coordinates are 0-indexed: ``coords[i]`` is the
coordinate of weight p^i.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Sequence

from .galois_ring import Embedding, FieldCtx, FieldElem, embed, field_ctx

__all__ = [
    "IntPoly",
    "WittStructurePolys",
    "build_structure_polys",
    "WittVec",
    "witt_add",
    "witt_mul",
    "witt_frobenius",
    "witt_trace",
    "nu_to_zmod",
    "FieldPoly",
    "build_fm",
    "evaluate_fm",
    "field_witt",
    "MAX_LENGTH",
]

MAX_LENGTH = 4

# A multivariate integer polynomial: exponent tuple -> nonzero coefficient.
IntPoly = dict


def _padd(a: IntPoly, b: IntPoly, sign: int = 1) -> IntPoly:
    out = dict(a)
    for k, v in b.items():
        c = out.get(k, 0) + sign * v
        if c:
            out[k] = c
        else:
            out.pop(k, None)
    return out


def _pmul(a: IntPoly, b: IntPoly) -> IntPoly:
    out: IntPoly = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            k = tuple(x + y for x, y in zip(ka, kb))
            c = out.get(k, 0) + va * vb
            if c:
                out[k] = c
            else:
                out.pop(k, None)
    return out


def _ppow(a: IntPoly, e: int, nvars: int) -> IntPoly:
    result: IntPoly = {(0,) * nvars: 1}
    base = a
    while e:
        if e & 1:
            result = _pmul(result, base)
        e >>= 1
        if e:
            base = _pmul(base, base)
    return result


def _pscale(a: IntPoly, c: int) -> IntPoly:
    return {k: v * c for k, v in a.items()} if c else {}


def _var(i: int, nvars: int) -> IntPoly:
    e = [0] * nvars
    e[i] = 1
    return {tuple(e): 1}


def _ghost(p: int, n: int, coords: Sequence[IntPoly], nvars: int) -> IntPoly:
    acc: IntPoly = {}
    for i in range(n + 1):
        acc = _padd(acc, _pscale(_ppow(coords[i], p ** (n - i), nvars), p**i))
    return acc


@dataclass(frozen=True, eq=False)
class WittStructurePolys:
    """Addition and multiplication polynomials S_n, P_n in X_0..X_{m-1}, Y_0..Y_{m-1}."""

    p: int
    m: int
    sum_polys: tuple
    prod_polys: tuple

    @property
    def nvars(self) -> int:
        return 2 * self.m

    def ghost_identity_holds(self) -> bool:
        p, m, nv = self.p, self.m, self.nvars
        xs = [_var(i, nv) for i in range(m)]
        ys = [_var(m + i, nv) for i in range(m)]
        for n in range(m):
            gx, gy = _ghost(p, n, xs, nv), _ghost(p, n, ys, nv)
            if _ghost(p, n, self.sum_polys, nv) != _padd(gx, gy):
                return False
            if _ghost(p, n, self.prod_polys, nv) != _pmul(gx, gy):
                return False
        return True

    def format(self) -> str:
        names = [f"X{i}" for i in range(self.m)] + [f"Y{i}" for i in range(self.m)]

        def fmt(poly: IntPoly) -> str:
            terms = []
            for exps, c in sorted(poly.items(), key=lambda kv: (sum(kv[0]), kv[0])):
                mono = "*".join(
                    n if e == 1 else f"{n}^{e}" for n, e in zip(names, exps) if e
                )
                terms.append(f"{c}" + (f"*{mono}" if mono else ""))
            return " + ".join(terms) if terms else "0"

        lines = [f"# Witt structure polynomials p={self.p} m={self.m}"]
        for n, s in enumerate(self.sum_polys):
            lines.append(f"S{n} = {fmt(s)}")
        for n, s in enumerate(self.prod_polys):
            lines.append(f"P{n} = {fmt(s)}")
        return "\n".join(lines) + "\n"


def _exact_div(poly: IntPoly, d: int) -> IntPoly:
    out = {}
    for k, v in poly.items():
        q, r = divmod(v, d)
        if r:
            raise AssertionError(f"ghost recursion: coefficient {v} not divisible by {d}")
        out[k] = q
    return out


@lru_cache(maxsize=None)
def build_structure_polys(p: int, m: int) -> WittStructurePolys:
    if not 1 <= m <= MAX_LENGTH:
        raise ValueError(f"Witt length must be between 1 and {MAX_LENGTH}, got {m}")
    nv = 2 * m
    xs = [_var(i, nv) for i in range(m)]
    ys = [_var(m + i, nv) for i in range(m)]
    sums: list[IntPoly] = []
    prods: list[IntPoly] = []
    for n in range(m):
        gx, gy = _ghost(p, n, xs, nv), _ghost(p, n, ys, nv)
        s_rest = _padd(gx, gy)
        p_rest = _pmul(gx, gy)
        for i in range(n):
            s_rest = _padd(s_rest, _pscale(_ppow(sums[i], p ** (n - i), nv), p**i), -1)
            p_rest = _padd(p_rest, _pscale(_ppow(prods[i], p ** (n - i), nv), p**i), -1)
        sums.append(_exact_div(s_rest, p**n))
        prods.append(_exact_div(p_rest, p**n))
    return WittStructurePolys(p, m, tuple(sums), tuple(prods))


@lru_cache(maxsize=None)
def _reduced(polys: WittStructurePolys) -> tuple[tuple, tuple]:
    """Structure polynomials with coefficients reduced mod p, zero terms dropped."""
    p = polys.p

    def red(poly):
        return tuple((k, v % p) for k, v in sorted(poly.items()) if v % p)

    return tuple(red(s) for s in polys.sum_polys), tuple(red(s) for s in polys.prod_polys)


@dataclass(frozen=True)
class WittVec:
    coords: tuple

    def __len__(self) -> int:
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]


def _evaluate(terms, values: Sequence[Any], zero):
    acc = zero
    cache: dict[tuple[int, int], Any] = {}
    for exps, c in terms:
        mono = None
        for j, e in enumerate(exps):
            if e:
                key = (j, e)
                pw = cache.get(key)
                if pw is None:
                    pw = values[j] ** e
                    cache[key] = pw
                mono = pw if mono is None else mono * pw
        term = mono * c if mono is not None else zero + c
        acc = acc + term
    return acc


def _zero_of(u: WittVec):
    x = u.coords[0]
    return x * 0


def _check_pair(u: WittVec, v: WittVec, polys: WittStructurePolys) -> None:
    if len(u) != len(v):
        raise ValueError(f"Witt vectors of lengths {len(u)} and {len(v)}")
    if len(u) != polys.m:
        raise ValueError(f"Witt vectors of length {len(u)} but structure polynomials for m={polys.m}")


def witt_add(u: WittVec, v: WittVec, polys: WittStructurePolys) -> WittVec:
    _check_pair(u, v, polys)
    values = list(u.coords) + list(v.coords)
    zero = _zero_of(u)
    sums, _ = _reduced(polys)
    return WittVec(tuple(_evaluate(t, values, zero) for t in sums))


def witt_mul(u: WittVec, v: WittVec, polys: WittStructurePolys) -> WittVec:
    _check_pair(u, v, polys)
    values = list(u.coords) + list(v.coords)
    zero = _zero_of(u)
    _, prods = _reduced(polys)
    return WittVec(tuple(_evaluate(t, values, zero) for t in prods))


def witt_frobenius(u: WittVec, p: int | None = None) -> WittVec:
    """Raise every coordinate to the p-th power."""
    if p is None:
        first = u.coords[0]
        p = first.ctx.p if isinstance(first, FieldElem) else first.p
    return WittVec(tuple(c**p for c in u.coords))


def witt_trace(w: WittVec, degree: int, polys: WittStructurePolys) -> WittVec:
    """Witt sum of F^j(w) for j < degree, where degree = [F_{q^k} : F_p]."""
    acc = w
    cur = w
    for _ in range(1, degree):
        cur = witt_frobenius(cur, polys.p)
        acc = witt_add(acc, cur, polys)
    for c in acc.coords:
        if not c.in_prime_field():
            raise AssertionError(f"Witt trace coordinate {c} not in F_p")
    return acc


@lru_cache(maxsize=None)
def _teich_zmod(p: int, m: int, a: int) -> int:
    mod = p**m
    z = a % mod
    for _ in range(m + 1):
        nz = pow(z, p, mod)
        if nz == z:
            return z
        z = nz
    raise AssertionError("Teichmüller lift in Z/p^m did not stabilise")  # pragma: no cover


def nu_to_zmod(w: WittVec, p: int) -> int:
    """Canonical isomorphism W_m(F_p) -> Z/p^m: sum teich(a_i) p^i."""
    m = len(w)
    mod = p**m
    total = 0
    for i, c in enumerate(w.coords):
        total += _teich_zmod(p, m, int(c)) * p**i
    return total % mod


# --- polynomials over F_q, the ring F_q[x] ----------------------------------


class FieldPoly:
    """Element of F_q[x]; coefficients are FieldElem of one field, lowest first."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: FieldCtx, coeffs: Sequence[FieldElem] = ()):
        cs = [field(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    @classmethod
    def monomial(cls, field: FieldCtx, c: FieldElem, u: int) -> FieldPoly:
        return cls(field, [field.zero] * u + [c])

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other):
        if isinstance(other, int):
            other = FieldPoly(self.field, [self.field(other)])
        n = max(len(self.coeffs), len(other.coeffs))
        z = self.field.zero
        a = self.coeffs + (z,) * (n - len(self.coeffs))
        b = other.coeffs + (z,) * (n - len(other.coeffs))
        return FieldPoly(self.field, [x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __mul__(self, other):
        if isinstance(other, int):
            return FieldPoly(self.field, [c * other for c in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return FieldPoly(self.field)
        out = [self.field.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x.is_zero():
                continue
            for j, y in enumerate(other.coeffs):
                out[i + j] = out[i + j] + x * y
        return FieldPoly(self.field, out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        result = FieldPoly(self.field, [self.field.one])
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, FieldPoly):
            return NotImplemented
        return self.field is other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, x: FieldElem, emb: Embedding | None = None) -> FieldElem:
        if emb is None:
            emb = embed(self.field, x.ctx)
        acc = x.ctx.zero
        for c in reversed(self.coeffs):
            acc = acc * x + emb(c)
        return acc

    def __repr__(self) -> str:
        return f"FieldPoly({list(self.coeffs)})"


def build_fm(spec, m: int) -> WittVec:
    """f^{(m)} = truncation to length m of sum_i iota_i(f_i), as a vector over F_q[x]."""
    if m < 1:
        raise ValueError("level m must be at least 1")
    polys = build_structure_polys(spec.p, m)
    F = spec.field
    zero = FieldPoly(F)
    acc = WittVec((zero,) * m)
    for i, row in sorted(spec.rows.items()):
        if i >= m:
            continue
        for u, c in enumerate(row):
            if c.is_zero():
                continue
            coords = [zero] * m
            coords[i] = FieldPoly.monomial(F, c, u)
            acc = witt_add(acc, WittVec(tuple(coords)), polys)
    return acc


def evaluate_fm(fm: WittVec, x: FieldElem, emb: Embedding | None = None) -> WittVec:
    """Apply the evaluation homomorphism F_q[x] -> F_{q^k}, x -> x, coordinatewise."""
    if emb is None:
        emb = embed(fm.coords[0].field, x.ctx)
    return WittVec(tuple(c(x, emb) for c in fm.coords))


def field_witt(ctx: FieldCtx, coords: Sequence) -> WittVec:
    return WittVec(tuple(ctx(c) for c in coords))


def prime_field(p: int) -> FieldCtx:
    return field_ctx(p, 1)
