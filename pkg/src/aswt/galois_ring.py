"""Finite fields F_{p^n} and Galois rings GR(p^m, n).

Both share one modulus per degree: the lexicographically smallest monic
irreducible polynomial over F_p, coefficient tuples read from the constant
term upward.  GR(p^m, n) is Z/p^m[x]/(modulus) with the same integer
coefficients, so reduction mod p is literally coordinatewise.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "FieldCtx",
    "FieldElem",
    "field_ctx",
    "GaloisRing",
    "GRElem",
    "gr_construct",
    "Embedding",
    "embed",
    "eval_fhat",
    "prime_factors",
]


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _is_prime(p: int) -> bool:
    return p >= 2 and prime_factors(p) == [p]


# --- F_p[x] helpers (lists of ints, lowest degree first) -------------------


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], g: list[int], p: int) -> list[int]:
    a = [c % p for c in a]
    _trim(a)
    dg = len(g) - 1
    inv = pow(g[-1], -1, p)
    while len(a) - 1 >= dg:
        c = a[-1] * inv % p
        shift = len(a) - 1 - dg
        for i, gi in enumerate(g):
            a[shift + i] = (a[shift + i] - c * gi) % p
        _trim(a)
    return a


def _pmulmod(a: list[int], b: list[int], g: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _pmod(out, g, p)


def _ppowmod(a: list[int], e: int, g: list[int], p: int) -> list[int]:
    result = [1]
    base = _pmod(a, g, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, g, p)
        base = _pmulmod(base, base, g, p)
        e >>= 1
    return result


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a = _trim([c % p for c in a])
    b = _trim([c % p for c in b])
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _is_irreducible(g: list[int], p: int) -> bool:
    n = len(g) - 1
    x = [0, 1]
    xp = x
    for i in range(1, n):
        xp = _ppowmod(xp, p, g, p)
        diff = list(xp) + [0] * max(0, 2 - len(xp))
        diff[1] = (diff[1] - 1) % p
        if len(_pgcd(g, diff, p)) - 1 != 0:
            return False
    xp = _ppowmod(xp, p, g, p)
    return _trim(list(xp)) == _pmod(x, g, p)


@lru_cache(maxsize=None)
def _canonical_modulus(p: int, n: int) -> tuple[int, ...]:
    for low in itertools.product(range(p), repeat=n):
        g = list(low) + [1]
        if _is_irreducible(g, p):
            return tuple(g)
    raise AssertionError(f"no irreducible polynomial of degree {n} over F_{p}")


# --- finite fields ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FieldCtx:
    """The field F_{p^n} presented as F_p[x]/(modulus)."""

    p: int
    n: int
    modulus: tuple[int, ...]

    @property
    def order(self) -> int:
        return self.p**self.n

    def __call__(self, value) -> FieldElem:
        if isinstance(value, FieldElem):
            if value.ctx is not self:
                raise ValueError("element belongs to a different field")
            return value
        if isinstance(value, int):
            coeffs = [value % self.p] + [0] * (self.n - 1)
        else:
            coeffs = [int(c) % self.p for c in value]
            if len(coeffs) > self.n:
                coeffs = _pmod(coeffs, list(self.modulus), self.p)
            coeffs += [0] * (self.n - len(coeffs))
        return FieldElem(self, tuple(coeffs))

    @property
    def zero(self) -> FieldElem:
        return self(0)

    @property
    def one(self) -> FieldElem:
        return self(1)

    def gen(self) -> FieldElem:
        """The class of x (for n = 1 this is the root of x + c, an element of F_p)."""
        return self([0, 1])

    def elements(self):
        """All elements in canonical order (lexicographic coefficient tuples)."""
        for t in itertools.product(range(self.p), repeat=self.n):
            yield FieldElem(self, t)

    def nonzero_elements(self):
        for e in self.elements():
            if not e.is_zero():
                yield e

    @property
    def generator(self) -> FieldElem:
        return _field_generator(self)

    def __repr__(self) -> str:
        return f"FieldCtx(p={self.p}, n={self.n}, modulus={self.modulus})"


@lru_cache(maxsize=None)
def field_ctx(p: int, n: int) -> FieldCtx:
    if not _is_prime(p):
        raise ValueError(f"{p} is not prime")
    if n < 1:
        raise ValueError("extension degree must be positive")
    modulus = _canonical_modulus(p, n)
    g = list(modulus)
    if not _is_irreducible(g, p):  # pragma: no cover
        raise AssertionError("canonical modulus failed irreducibility check")
    return FieldCtx(p, n, modulus)


@lru_cache(maxsize=None)
def _field_generator(ctx: FieldCtx) -> FieldElem:
    N = ctx.order - 1
    factors = prime_factors(N)
    for e in ctx.nonzero_elements():
        if all(e ** (N // r) != ctx.one for r in factors):
            return e
    raise AssertionError("multiplicative group has no generator")  # pragma: no cover


@dataclass(frozen=True, eq=False)
class FieldElem:
    ctx: FieldCtx
    coeffs: tuple[int, ...]

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def in_prime_field(self) -> bool:
        return not any(self.coeffs[1:])

    def __int__(self) -> int:
        if not self.in_prime_field():
            raise ValueError(f"{self} is not in F_p")
        return self.coeffs[0]

    def _coerce(self, other) -> FieldElem:
        if isinstance(other, FieldElem):
            if other.ctx is not self.ctx:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, int):
            return self.ctx(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.ctx.p
        return FieldElem(self.ctx, tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        p = self.ctx.p
        return FieldElem(self.ctx, tuple(-a % p for a in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            p = self.ctx.p
            return FieldElem(self.ctx, tuple(a * other % p for a in self.coeffs))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        ctx = self.ctx
        prod = _pmulmod(list(self.coeffs), list(other.coeffs), list(ctx.modulus), ctx.p)
        return FieldElem(ctx, tuple(prod + [0] * (ctx.n - len(prod))))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        ctx = self.ctx
        prod = _ppowmod(list(self.coeffs), e, list(ctx.modulus), ctx.p)
        return FieldElem(ctx, tuple(prod + [0] * (ctx.n - len(prod))))

    def inverse(self) -> FieldElem:
        if self.is_zero():
            raise ZeroDivisionError("zero has no inverse")
        return self ** (self.ctx.order - 2)

    def frobenius(self, times: int = 1) -> FieldElem:
        return self ** (self.ctx.p**times)

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ctx(other)
        if not isinstance(other, FieldElem):
            return NotImplemented
        return self.ctx is other.ctx and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ctx.p, self.ctx.n, self.coeffs))

    def __lt__(self, other: FieldElem) -> bool:
        return self.coeffs < other.coeffs

    def __repr__(self) -> str:
        if self.ctx.n == 1:
            return f"{self.coeffs[0]}"
        return f"F{self.ctx.p}^{self.ctx.n}{list(self.coeffs)}"


# --- Galois rings -----------------------------------------------------------


class GaloisRing:
    """GR(p^m, n) = Z/p^m [x] / (canonical degree-n modulus)."""

    def __init__(self, p: int, m: int, n: int):
        if m < 1:
            raise ValueError("m must be positive")
        self.p = p
        self.m = m
        self.n = n
        self.field = field_ctx(p, n)
        self.modulus = self.field.modulus
        self.pm = p**m
        self._frob_mat = None
        self._trace_vec = None
        self._tensor = None

    def __repr__(self) -> str:
        return f"GaloisRing(p={self.p}, m={self.m}, n={self.n})"

    # construction ---------------------------------------------------------

    def __call__(self, value) -> GRElem:
        if isinstance(value, GRElem):
            if value.ring is not self:
                raise ValueError("element belongs to a different ring")
            return value
        if isinstance(value, FieldElem):
            value = value.coeffs
        if isinstance(value, int):
            coeffs = [value] + [0] * (self.n - 1)
        else:
            coeffs = [int(c) for c in value]
            if len(coeffs) > self.n:
                coeffs = self._reduce_poly(coeffs)
            coeffs += [0] * (self.n - len(coeffs))
        return GRElem(self, tuple(c % self.pm for c in coeffs))

    @property
    def zero(self) -> GRElem:
        return self(0)

    @property
    def one(self) -> GRElem:
        return self(1)

    def gen(self) -> GRElem:
        return self([0, 1])

    def _reduce_poly(self, coeffs: list[int]) -> list[int]:
        coeffs = list(coeffs)
        n, pm, g = self.n, self.pm, self.modulus
        for top in range(len(coeffs) - 1, n - 1, -1):
            c = coeffs[top] % pm
            if c:
                shift = top - n
                for i in range(n):
                    coeffs[shift + i] -= c * g[i]
            coeffs[top] = 0
        return [c % pm for c in coeffs[:n]]

    def mul(self, a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
        n = self.n
        if n == 1:
            return (a[0] * b[0] % self.pm,)
        out = [0] * (2 * n - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return tuple(self._reduce_poly(out))

    def residue(self, alpha: GRElem) -> FieldElem:
        return self.field(alpha.coeffs)

    # Teichmüller, Frobenius, trace -----------------------------------------

    def teichmuller(self, r) -> GRElem:
        """Unique lift t of ``r`` with t^{p^n} = t."""
        if not isinstance(r, FieldElem):
            r = self.field(r)
        z = self(r.coeffs)
        q = self.p**self.n
        for _ in range(self.m + 1):
            nz = z**q
            if nz == z:
                return z
            z = nz
        raise AssertionError(f"Teichmüller iteration did not converge for {r}")

    def digits(self, alpha: GRElem) -> list[GRElem]:
        """Teichmüller digits t_0..t_{m-1} with alpha = sum t_i p^i."""
        out = []
        rest = alpha
        for i in range(self.m):
            t = self.teichmuller(self.residue(rest))
            out.append(t)
            diff = rest - t
            if any(c % self.p for c in diff.coeffs):
                raise AssertionError("digit extraction failed: residue not divisible by p")
            rest = GRElem(self, tuple((c // self.p) % self.pm for c in diff.coeffs))
        return out

    def frobenius(self, alpha: GRElem) -> GRElem:
        """sum t_i^p p^i where alpha = sum t_i p^i in Teichmüller digits."""
        acc = self.zero
        scale = 1
        for t in self.digits(alpha):
            acc = acc + (t**self.p) * scale
            scale *= self.p
        return acc

    def frobenius_matrix(self, power: int = 1) -> np.ndarray:
        """Matrix (object ints) of alpha -> frobenius^power(alpha) on the power basis.

        Built from the Frobenius image of x, since Frobenius is a Z/p^m-algebra
        automorphism.  Columns are images of x^j.
        """
        power %= self.n
        if self._frob_mat is None:
            fx = self.frobenius(self.gen())
            cols = []
            acc = self.one
            for _ in range(self.n):
                cols.append(acc.coeffs)
                acc = acc * fx
            self._frob_mat = np.array(cols, dtype=object).T
        mat = np.identity(self.n, dtype=object)
        for _ in range(power):
            mat = (self._frob_mat.dot(mat)) % self.pm
        return mat

    def apply_frobenius(self, alpha: GRElem, power: int = 1) -> GRElem:
        mat = self.frobenius_matrix(power)
        vec = mat.dot(np.array(alpha.coeffs, dtype=object)) % self.pm
        return GRElem(self, tuple(int(c) for c in vec))

    def trace_vector(self) -> tuple[int, ...]:
        """Traces of the basis elements 1, x, ..., x^{n-1}."""
        if self._trace_vec is None:
            total = np.zeros((self.n, self.n), dtype=object)
            for j in range(self.n):
                total = total + self.frobenius_matrix(j)
            total %= self.pm
            if any(total[i, j] for i in range(1, self.n) for j in range(self.n)):
                raise AssertionError("trace left the prime subring")
            self._trace_vec = tuple(int(c) for c in total[0])
        return self._trace_vec

    def trace(self, alpha: GRElem) -> int:
        """sum_{j<n} frobenius^j(alpha), returned as a residue mod p^m."""
        acc = alpha
        cur = alpha
        for _ in range(1, self.n):
            cur = self.frobenius(cur)
            acc = acc + cur
        if any(acc.coeffs[1:]):
            raise AssertionError(f"trace {acc} not in Z/p^m")
        return acc.coeffs[0]

    def fast_trace(self, alpha: GRElem) -> int:
        tv = self.trace_vector()
        return sum(a * t for a, t in zip(alpha.coeffs, tv)) % self.pm

    # structure data for vectorised arithmetic ------------------------------

    def mult_matrix(self, alpha) -> np.ndarray:
        """Regular representation: column j holds alpha * x^j."""
        coeffs = alpha.coeffs if isinstance(alpha, GRElem) else tuple(alpha)
        cols = []
        cur = coeffs
        x = self.gen().coeffs
        for _ in range(self.n):
            cols.append(cur)
            cur = self.mul(cur, x)
        return np.array(cols, dtype=object).T


@lru_cache(maxsize=None)
def gr_construct(p: int, m: int, n: int) -> GaloisRing:
    if not _is_prime(p):
        raise ValueError(f"{p} is not prime")
    return GaloisRing(p, m, n)


@dataclass(frozen=True, eq=False)
class GRElem:
    ring: GaloisRing
    coeffs: tuple[int, ...]

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def _coerce(self, other):
        if isinstance(other, GRElem):
            if other.ring is not self.ring:
                raise ValueError("elements of different Galois rings")
            return other
        if isinstance(other, int):
            return self.ring(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        pm = self.ring.pm
        return GRElem(self.ring, tuple((a + b) % pm for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        pm = self.ring.pm
        return GRElem(self.ring, tuple(-a % pm for a in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            pm = self.ring.pm
            return GRElem(self.ring, tuple(a * other % pm for a in self.coeffs))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return GRElem(self.ring, self.ring.mul(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers are not supported")
        result = self.ring.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring(other)
        if not isinstance(other, GRElem):
            return NotImplemented
        return self.ring is other.ring and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ring.p, self.ring.m, self.ring.n, self.coeffs))

    def __repr__(self) -> str:
        return f"GR({self.ring.p}^{self.ring.m},{self.ring.n}){list(self.coeffs)}"


# --- embeddings -------------------------------------------------------------


class Embedding:
    """Field homomorphism F_{p^a} -> F_{p^n}, fixed by the image of x."""

    def __init__(self, sub: FieldCtx, sup: FieldCtx, image: FieldElem):
        self.sub = sub
        self.sup = sup
        self.image = image
        self._powers = [sup.one]
        for _ in range(1, sub.n):
            self._powers.append(self._powers[-1] * image)

    def __call__(self, e: FieldElem) -> FieldElem:
        if e.ctx is not self.sub:
            raise ValueError("element is not in the source field")
        acc = self.sup.zero
        for c, pw in zip(e.coeffs, self._powers):
            if c:
                acc = acc + pw * c
        return acc


def _eval_fp_poly(coeffs, x: FieldElem) -> FieldElem:
    acc = x.ctx.zero
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


@lru_cache(maxsize=None)
def _embedding_roots(sub: FieldCtx, sup: FieldCtx) -> tuple[FieldElem, ...]:
    return tuple(e for e in sup.elements() if _eval_fp_poly(sub.modulus, e).is_zero())


def embed(sub: FieldCtx, sup: FieldCtx, root_index: int = 0) -> Embedding:
    """Embedding sending the generator of ``sub`` to the least root of its modulus.

    ``root_index`` selects another conjugate root (used to test independence
    of the choice).
    """
    if sub.p != sup.p or sup.n % sub.n:
        raise ValueError(f"F_{sub.p}^{sub.n} does not embed in F_{sup.p}^{sup.n}")
    if sub.n == 1:
        return Embedding(sub, sup, sup.zero)
    roots = _embedding_roots(sub, sup)
    if not roots:
        raise AssertionError("no root of the subfield modulus found")  # pragma: no cover
    emb = Embedding(sub, sup, roots[root_index])
    for a, b in itertools.islice(itertools.product(sub.elements(), repeat=2), 0, None, 7):
        if emb(a * b) != emb(a) * emb(b) or emb(a + b) != emb(a) + emb(b):
            raise AssertionError("embedding is not a ring homomorphism")
    return emb


def eval_fhat(spec, m: int, xhat: GRElem, emb: Embedding | None = None) -> GRElem:
    """Evaluate sum_{i<m} p^i sum_u teich(a_iu) xhat^u in GR(p^m, n)."""
    ring = xhat.ring
    if emb is None:
        emb = embed(spec.field, ring.field)
    powers = [ring.one]
    acc = ring.zero
    for i, row in spec.rows.items():
        if i >= m:
            continue
        scale = spec.p**i
        for u, c in enumerate(row):
            if c.is_zero():
                continue
            while len(powers) <= u:
                powers.append(powers[-1] * xhat)
            acc = acc + ring.teichmuller(emb(c)) * powers[u] * scale
    return acc
