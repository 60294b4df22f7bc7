"""T-adic side: Artin-Hasse series, pi_i(T), E_f, the matrix M and C_f(T, s) = det(I - s M_a).

Everything is truncated mod (p^N, T^{N_T}).  Internally the Fredholm
recurrence runs with extra p-adic guard digits because it divides by n.
M is sigma^{-1}-semilinear; for a > 1 the linear map phi^a has matrix
M_a = M * sigma^{-1}(M) * ... * sigma^{-(a-1)}(M), and that is what gets
traced and determined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .cyclotomic import CycInt, pi_valuation, psi_char, v_p
from .errors import OracleViolation, PrecisionError
from .expsums import TowerSpec, tower_constants
from .galois_ring import embed, gr_construct

__all__ = [
    "TSeries",
    "artin_hasse",
    "artin_hasse_rational",
    "pi_series",
    "EfCoefficients",
    "build_Ef",
    "DworkMatrix",
    "dwork_matrix",
    "FredholmResult",
    "fredholm",
    "Order",
    "ord_R",
    "OrderReport",
    "order_report",
    "hodge_check",
    "specialize_T",
    "agree_mod_cap",
    "specialization_cap",
    "DworkResult",
    "DworkPrecision",
    "default_precision",
    "run_dwork",
    "lambda_target",
    "check_pi_decay",
    "check_alpha_decay",
    "truncation_stability",
    "lf_newton_check",
]


# --- truncated series ------------------------------------------------------


@dataclass(frozen=True)
class TSeries:
    """sum c_j T^j mod (p^{N_p}, T^{N_T}) with integer coefficients."""

    p: int
    N_T: int
    N_p: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        mod = self.p**self.N_p
        cs = tuple(int(c) % mod for c in self.coeffs[: self.N_T])
        cs += (0,) * (self.N_T - len(cs))
        object.__setattr__(self, "coeffs", cs)

    def _meet(self, other: TSeries) -> tuple[int, int]:
        if self.p != other.p:
            raise ValueError("series over different primes")
        return min(self.N_T, other.N_T), min(self.N_p, other.N_p)

    def __add__(self, other: TSeries) -> TSeries:
        nt, np_ = self._meet(other)
        return TSeries(self.p, nt, np_, tuple(a + b for a, b in zip(self.coeffs[:nt], other.coeffs[:nt])))

    def __sub__(self, other: TSeries) -> TSeries:
        nt, np_ = self._meet(other)
        return TSeries(self.p, nt, np_, tuple(a - b for a, b in zip(self.coeffs[:nt], other.coeffs[:nt])))

    def __mul__(self, other):
        if isinstance(other, int):
            return TSeries(self.p, self.N_T, self.N_p, tuple(c * other for c in self.coeffs))
        nt, np_ = self._meet(other)
        out = [0] * nt
        for i, x in enumerate(self.coeffs[:nt]):
            if x:
                for j in range(nt - i):
                    out[i + j] += x * other.coeffs[j]
        return TSeries(self.p, nt, np_, tuple(out))

    def truncate(self, N_T: int | None = None, N_p: int | None = None) -> TSeries:
        return TSeries(self.p, min(N_T or self.N_T, self.N_T), min(N_p or self.N_p, self.N_p), self.coeffs)

    def t_order(self):
        """First index with a nonzero residue, or None when everything vanishes at this precision."""
        return next((j for j, c in enumerate(self.coeffs) if c), None)

    def to_json(self) -> dict:
        return {"p": self.p, "N_T": self.N_T, "N_p": self.N_p, "coeffs": list(self.coeffs)}


# --- Artin-Hasse exponential and pi_i ---------------------------------------


@lru_cache(maxsize=None)
def artin_hasse_rational(N_X: int, p: int) -> tuple[Fraction, ...]:
    """Exact coefficients of exp(sum_{i>=0} X^{p^i}/p^i) below X^{N_X}.

    From E' = E * sum_i X^{p^i - 1}: n e_n = sum_{p^i <= n} e_{n - p^i}.
    """
    e = [Fraction(1)]
    for n in range(1, N_X):
        acc = Fraction(0)
        pk = 1
        while pk <= n:
            acc += e[n - pk]
            pk *= p
        e.append(acc / n)
    return tuple(e)


def _to_residue(x: Fraction, p: int, N: int) -> int:
    if x.denominator % p == 0:
        raise OracleViolation(f"Artin-Hasse coefficient {x} is not p-integral")
    mod = p**N
    return x.numerator * pow(x.denominator, -1, mod) % mod


def artin_hasse(N_X: int, N_p: int, p: int) -> list[int]:
    """E(X) coefficients mod p^{N_p}, each checked p-integral."""
    return [_to_residue(c, p, N_p) for c in artin_hasse_rational(N_X, p)]


def _series_mul(a, b, n, mod):
    out = [0] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j in range(min(len(b), n - i)):
                out[i + j] += x * b[j]
    return [c % mod for c in out]


@lru_cache(maxsize=None)
def _ah_inverse(N: int, N_p: int, p: int) -> tuple[int, ...]:
    """h with E(h(t)) = 1 + t, mod (p^{N_p}, t^N); h = t - sum_{k>=2} e_k h^k solved degree by degree."""
    mod = p**N_p
    e = artin_hasse(N, N_p, p)
    h = [0] * N
    if N > 1:
        h[1] = 1
    for n in range(2, N):
        # coefficient n of sum_{k>=2} e_k h^k, using h_1..h_{n-1}
        acc = 0
        power = h[: n + 1]
        for k in range(2, n + 1):
            power = _series_mul(power, h, n + 1, mod)
            acc += e[k] * power[n]
        h[n] = -acc % mod
    return tuple(h)


@lru_cache(maxsize=None)
def pi_series(i: int, N_T: int, N_p: int, p: int) -> TSeries:
    """pi_i with E(pi_i) = (1 + T)^{p^i}, by reverting E - 1 and composing with (1+T)^{p^i} - 1."""
    if i < 0:
        raise ValueError("i must be non-negative")
    mod = p**N_p
    h = _ah_inverse(N_T, N_p, p)
    u = [math.comb(p**i, j) % mod for j in range(N_T)]
    u[0] = 0
    out = [0] * N_T
    power = [1] + [0] * (N_T - 1)
    for n in range(1, N_T):
        power = _series_mul(power, u, N_T, mod)
        if h[n]:
            for j in range(N_T):
                out[j] += h[n] * power[j]
    s = TSeries(p, N_T, N_p, tuple(out))
    if N_T > 1 and (s.coeffs[0] != 0 or (i == 0 and s.coeffs[1] != 1)):
        raise OracleViolation("pi_0 must lie in T + T^2 Z_p[[T]]")
    for j, c in enumerate(s.coeffs):
        if j == 0 or not c:
            continue
        # coefficient of T^j in (1+T)^{p^i} - 1 has order >= i - floor(log_p j)
        lg = 0
        while p ** (lg + 1) <= j:
            lg += 1
        need = max(0, i - lg)
        if v_p(c, p) < min(need, N_p):
            raise OracleViolation(f"pi_{i}: T^{j} coefficient has p-order below {need}")
    return s


# --- GR-valued series algebra -------------------------------------------------


class _SeriesAlgebra:
    """GR(p^N, a)[[T]]/T^{N_T}; elements are arrays of shape (N_T, a)."""

    def __init__(self, p: int, N: int, a: int, N_T: int):
        self.p, self.N, self.a, self.N_T = p, N, a, N_T
        self.ring = gr_construct(p, N, a)
        self.mod = p**N
        # regmat(y)[k, j] = sum_i y_i C[i, j, k]
        C = np.zeros((a, a, a), dtype=object)
        for i in range(a):
            for j in range(a):
                xi = [0] * a
                xi[i] = 1
                xj = [0] * a
                xj[j] = 1
                C[i, j, :] = list(self.ring.mul(tuple(xi), tuple(xj)))
        self.C = C

    def zeros(self, *shape) -> np.ndarray:
        return np.zeros(shape + (self.N_T, self.a), dtype=object)

    def regmat(self, y) -> np.ndarray:
        """Regular representation of elements y[..., a] -> [..., a, a]."""
        y = np.asarray(y, dtype=object)
        return np.tensordot(y, self.C, axes=([-1], [0])).swapaxes(-1, -2) % self.mod

    def mulmat(self, c: np.ndarray) -> np.ndarray:
        """Matrix of multiplication by the series c on flattened (N_T * a) vectors."""
        NT, a = self.N_T, self.a
        blocks = self.regmat(c)  # (N_T, a, a)
        K = NT * a
        M = np.zeros((K, K), dtype=object)
        for s in range(NT):
            if not blocks[s].any():
                continue
            for t in range(s, NT):
                r = t - s
                M[t * a : (t + 1) * a, r * a : (r + 1) * a] = blocks[s]
        return M

    def scale(self, arr: np.ndarray, c: np.ndarray) -> np.ndarray:
        """Multiply every series in arr[..., N_T, a] by the series c."""
        shape = arr.shape
        flat = arr.reshape(-1, self.N_T * self.a)
        out = flat.dot(self.mulmat(c).T) % self.mod
        return out.reshape(shape)

    def mul(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return self.scale(x[None], y)[0]

    def const(self, elem_coeffs) -> np.ndarray:
        out = self.zeros()
        out[0, :] = list(elem_coeffs)
        return out


# --- E_f ---------------------------------------------------------------------


@dataclass
class EfCoefficients:
    """alpha_0..alpha_{U_max} of E_f(x), as GR(p^N, a)-valued series in T."""

    spec: TowerSpec
    N_T: int
    N_p: int
    alphas: np.ndarray  # (U_max + 1, N_T, a)
    rows_used: tuple[int, ...]

    @property
    def U_max(self) -> int:
        return self.alphas.shape[0] - 1

    def alpha(self, u: int) -> np.ndarray:
        if u < 0 or u > self.U_max:
            if u < 0:
                return np.zeros(self.alphas.shape[1:], dtype=object)
            raise IndexError(f"alpha_{u} beyond U_max = {self.U_max}")
        return self.alphas[u]


def build_Ef(spec: TowerSpec, N_T: int, N_p: int, U_max: int) -> EfCoefficients:
    """prod over nonzero rows i and terms u of E(pi_i * teich(a_iu) * x^u)."""
    p, a = spec.p, spec.a
    alg = _SeriesAlgebra(p, N_p, a, N_T)
    ring = alg.ring
    emb = embed(spec.field, ring.field)
    e = artin_hasse(max(N_T, 2), N_p, p)
    prod = alg.zeros(U_max + 1)
    prod[0, 0, 0] = 1
    for i, row in sorted(spec.rows.items()):
        pi_i = pi_series(i, N_T, N_p, p)
        for u, c in enumerate(row):
            if c.is_zero():
                continue
            chat = ring.teichmuller(emb(c))
            w = alg.zeros()
            for j, pc in enumerate(pi_i.coeffs):
                w[j, :] = [pc * x % alg.mod for x in chat.coeffs]
            if u == 0:
                # E(pi_i chat) is a constant series; its powers never leave x^0
                total = alg.zeros()
                wn = alg.const([1] + [0] * (a - 1))
                for n in range(N_T):
                    total = (total + wn * e[n]) % alg.mod
                    wn = alg.mul(wn, w)
                prod = alg.scale(prod, total)
                continue
            new = prod.copy()
            wn = alg.const([1] + [0] * (a - 1))
            for n in range(1, N_T):
                wn = alg.mul(wn, w)
                if u * n > U_max:
                    break
                tau = wn * e[n] % alg.mod
                if not tau.any():
                    continue
                shifted = alg.scale(prod[: U_max + 1 - u * n], tau)
                new[u * n :] = (new[u * n :] + shifted) % alg.mod
            prod = new
    ef = EfCoefficients(spec, N_T, N_p, prod, tuple(sorted(spec.rows)))
    D = tower_constants(spec).D
    for uu in range(U_max + 1):
        need = min(-(-uu // D), N_T)
        if prod[uu, :need].any():
            raise OracleViolation(f"alpha_{uu} is not divisible by T^{need}")
    return ef


# --- the matrix M --------------------------------------------------------------


@dataclass
class DworkMatrix:
    """Entries sigma^{-1}(alpha_{pu-v}) for 0 <= u, v < B, with the linear map phi^a."""

    spec: TowerSpec
    B: int
    N_T: int
    N_p: int
    entries: np.ndarray  # (B, B, N_T, a): sigma^{-1}(alpha_{pu - v})
    linear: np.ndarray  # (N_T, B a, B a): matrix of phi^a over Z/p^N, T-graded

    def entry(self, u: int, v: int) -> np.ndarray:
        return self.entries[u, v]


def _frobenius_inverse_power(alg: _SeriesAlgebra, j: int) -> np.ndarray:
    """Matrix of sigma^{-j} on GR coordinates."""
    a = alg.a
    return alg.ring.frobenius_matrix((-j) % a)


def _to_block(alg: _SeriesAlgebra, ent: np.ndarray) -> np.ndarray:
    """(B, B, N_T, a) GR series -> (N_T, B a, B a) regular-representation blocks."""
    B = ent.shape[0]
    a = alg.a
    reg = alg.regmat(ent)  # (B, B, N_T, a, a)
    return reg.transpose(2, 0, 3, 1, 4).reshape(alg.N_T, B * a, B * a)


def _limbs(A: np.ndarray, bits: int, count: int) -> list[np.ndarray]:
    """Split non-negative entries into ``count`` float64 digits base 2^bits."""
    if count == 1:
        return [A.astype(np.float64)]
    mask = (1 << bits) - 1
    Ao = A.astype(object)
    return [((Ao >> (bits * i)) & mask).astype(np.float64) for i in range(count)]


def _series_matmul(A: np.ndarray, Bm: np.ndarray, mod: int) -> np.ndarray:
    """Product of T-graded matrices (N_T, n, k) x (N_T, k, r) mod (mod, T^{N_T}).

    Coefficient t is one stacked product [A_0 .. A_t] @ [B_t .. B_0].  Entries
    are split into limbs small enough that every float64 partial sum stays
    below 2^53, so the BLAS products are exact integers.
    """
    NT, n, k = A.shape
    r = Bm.shape[2]
    inner = NT * k
    bits = max(1, (53 - inner.bit_length()) // 2)
    count = max(1, -(-(mod - 1).bit_length() // bits))
    Ah = [x.transpose(1, 0, 2).reshape(n, inner) for x in _limbs(A, bits, count)]
    Bv = [x[::-1].reshape(inner, r) for x in _limbs(Bm, bits, count)]
    small = mod < 2**62
    out = np.zeros((NT, n, r), dtype=np.int64 if small else object)
    for t in range(NT):
        lo = (NT - 1 - t) * k
        width = (t + 1) * k
        if count == 1:
            out[t] = (Ah[0][:, :width] @ Bv[0][lo:, :]).astype(np.int64) % mod
            continue
        acc = np.zeros((n, r), dtype=object)
        for i in range(count):
            for j in range(count):
                prod = (Ah[i][:, :width] @ Bv[j][lo:, :]).astype(np.int64)
                acc = acc + (prod.astype(object) << (bits * (i + j)))
        out[t] = acc % mod
    return out


def dwork_matrix(spec: TowerSpec, N_T: int, N_p: int, B: int, ef: EfCoefficients | None = None) -> DworkMatrix:
    p, a = spec.p, spec.a
    if ef is None or ef.U_max < p * B or ef.N_T != N_T or ef.N_p != N_p:
        ef = build_Ef(spec, N_T, N_p, p * B)
    alg = _SeriesAlgebra(p, N_p, a, N_T)
    u = np.arange(B)[:, None]
    v = np.arange(B)[None, :]
    idx = p * u - v
    base = np.zeros((B, B, N_T, a), dtype=object)
    valid = idx >= 0
    base[valid] = ef.alphas[idx[valid]]
    linear = None
    first = None
    for j in range(1, a + 1):
        S = _frobenius_inverse_power(alg, j)  # sigma^{-j}
        ent = np.tensordot(base, S.T, axes=([-1], [0])) % alg.mod if a > 1 else base
        if j == 1:
            first = ent
        block = _to_block(alg, ent)
        linear = block if linear is None else _series_matmul(linear, block, alg.mod)
    return DworkMatrix(spec, B, N_T, N_p, first, np.asarray(linear))


# --- Fredholm determinant --------------------------------------------------


@dataclass
class FredholmResult:
    """Coefficients b_1..b_{N_s} of C_f(T, s) and the traces Tr(M_a^k)."""

    p: int
    N_T: int
    N_p: int
    b: list[TSeries]  # b[0] = 1
    traces: list[TSeries]  # traces[k-1] = Tr(M_a^k)
    B: int

    @property
    def N_s(self) -> int:
        return len(self.b) - 1


def _gr_trace_of(linear: np.ndarray, B: int, a: int, mod: int) -> np.ndarray:
    """GR-valued trace of a block matrix: sum of first columns of diagonal blocks -> (N_T, a)."""
    NT = linear.shape[0]
    out = np.zeros((NT, a), dtype=object)
    for u in range(B):
        out = out + linear[:, u * a : (u + 1) * a, u * a].astype(object)
    return out % mod


def fredholm(mx: DworkMatrix, N_s: int, N_p_out: int | None = None) -> FredholmResult:
    """det(I - s M_a) through n b_n = -sum_{k<=n} Tr(M_a^k) b_{n-k}.

    ``mx`` must carry enough guard digits: the result is reduced to
    ``N_p_out`` (default: mx.N_p minus the digits lost to division).
    """
    if N_s > mx.B // 2:
        raise PrecisionError(f"N_s = {N_s} exceeds B/2 = {mx.B // 2}")
    p, a, NT = mx.spec.p, mx.spec.a, mx.N_T
    mod = p**mx.N_p
    traces = []
    power = mx.linear
    for k in range(1, N_s + 1):
        if k > 1:
            power = _series_matmul(power, mx.linear, mod)
        tr = _gr_trace_of(power, mx.B, a, mod)
        if a > 1 and tr[:, 1:].any():
            raise OracleViolation(f"Tr(M_a^{k}) is not in Z_p[[T]]")
        traces.append([int(c) for c in tr[:, 0]])
    bs = [[1] + [0] * (NT - 1)]
    precs = [mx.N_p]
    for n in range(1, N_s + 1):
        acc = [0] * NT
        for k in range(1, n + 1):
            prod = _series_mul(traces[k - 1], bs[n - k], NT, mod)
            acc = [x - y for x, y in zip(acc, prod)]
        acc = [x % mod for x in acc]
        e = int(v_p(n, p))
        unit = n // p**e
        if any(c % p**e for c in acc):
            raise OracleViolation(f"n b_n not divisible by p^{e} at n = {n}")
        inv = pow(unit, -1, mod)
        bn = [(c // p**e) * inv % mod for c in acc]
        bs.append(bn)
        precs.append(min(precs[:n]) - e)
    lost = mx.N_p - min(precs)
    out_p = N_p_out if N_p_out is not None else mx.N_p - lost
    if out_p > mx.N_p - lost:
        raise PrecisionError(f"requested N_p = {out_p} but only {mx.N_p - lost} digits survive")
    return FredholmResult(
        p=p,
        N_T=NT,
        N_p=out_p,
        b=[TSeries(p, NT, out_p, tuple(b)) for b in bs],
        traces=[TSeries(p, NT, out_p, tuple(t)) for t in traces],
        B=mx.B,
    )


# --- orders ----------------------------------------------------------------


@dataclass(frozen=True)
class Order:
    """An R-order: ``value`` is exact when ``exact`` is set, otherwise a lower bound."""

    value: Fraction
    exact: bool

    def __str__(self) -> str:
        return f"{self.value}" if self.exact else f">={self.value}"


def _r_weight(spec: TowerSpec) -> Fraction:
    """Weight of one p-adic digit in R-order: p^{m~-2}(p-1) for m~ >= 2, none for m~ = 1."""
    mt = tower_constants(spec).m_tilde
    if mt == 1:
        return Fraction(0)
    return Fraction((spec.p - 1) * spec.p ** (mt - 1), spec.p)


def ord_R(series: TSeries, spec: TowerSpec) -> Order:
    """min_j (j + weight * ord_p(c_j)); zero residues count as ord_p >= N_p."""
    w = _r_weight(spec)
    best = None
    bound = Fraction(series.N_T)
    for j, c in enumerate(series.coeffs):
        if c:
            val = j + w * int(v_p(c, series.p))
            best = val if best is None else min(best, val)
        elif w:
            bound = min(bound, j + w * series.N_p)
    if w == 0:
        # the order is the first nonzero T-coefficient, read off mod p^N_p
        j = series.t_order()
        if j is None:
            return Order(Fraction(series.N_T), False)
        return Order(Fraction(j), True)
    if best is not None and best < bound:
        return Order(Fraction(best), True)
    return Order(min(best, bound) if best is not None else bound, False)


def _coeff_orders(arr, p: int) -> list:
    """Per-T-degree p-order of a series (N_T,) or GR series (N_T, a); None for a zero residue."""
    out = []
    for row in np.asarray(arr, dtype=object).reshape(len(arr), -1):
        vals = [int(v_p(int(c), p)) for c in row if int(c)]
        out.append(min(vals) if vals else None)
    return out


def _meets(orders: list, w: Fraction, bound) -> bool:
    """Every visible term c_j T^j has j + w ord_p(c_j) >= bound."""
    return all(o is None or j + w * o >= bound for j, o in enumerate(orders))


def check_pi_decay(spec: TowerSpec, N_T: int, N_p: int) -> list[dict]:
    """ord_R(pi_i) >= p^i for i < m~, and >= p^{m~-1} up to the last nonzero row."""
    const = tower_constants(spec)
    w = _r_weight(spec)
    out = []
    for i in range(max(const.m_tilde, max(spec.rows) + 1)):
        bound = spec.p ** min(i, const.m_tilde - 1)
        s = pi_series(i, N_T, N_p, spec.p)
        out.append({"i": i, "bound": bound, "pass": _meets(_coeff_orders(s.coeffs, spec.p), w, bound)})
    return out


def check_alpha_decay(ef: EfCoefficients) -> list[dict]:
    """ord_R(alpha_u) >= u / delta for every computed alpha_u."""
    spec = ef.spec
    delta = tower_constants(spec).delta
    w = _r_weight(spec)
    out = []
    for u in range(ef.U_max + 1):
        bound = Fraction(u) / delta
        ok = _meets(_coeff_orders(ef.alphas[u], spec.p), w, bound)
        out.append({"u": u, "bound": _fmt(bound), "pass": ok})
    return out


def lambda_target(spec: TowerSpec, k: int) -> Fraction:
    """a(p-1)k(k-1)/(2 delta)."""
    delta = tower_constants(spec).delta
    return Fraction(spec.a * (spec.p - 1) * k * (k - 1)) / (2 * delta)


@dataclass
class OrderReport:
    records: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.get("exact_order", True) is not False and r["hodge"] for r in self.records)

    def to_json(self) -> dict:
        return {"pass": self.passed, "records": self.records}


def _fmt(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _hodge_ok(series: TSeries, spec: TowerSpec, bound: Fraction):
    """(ok, certificate) for ord_R(series) >= bound."""
    w = _r_weight(spec)
    if bound > series.N_T:
        return None, "beyond_T_precision"
    if w == 0:
        ok = all(c == 0 for j, c in enumerate(series.coeffs) if j < bound)
        return ok, f"mod p^{series.N_p}"
    if w * series.N_p < bound:
        return None, "beyond_p_precision"
    ok = all(c == 0 or j + w * int(v_p(c, series.p)) >= bound for j, c in enumerate(series.coeffs))
    return ok, "exact"


def hodge_check(result: FredholmResult, spec: TowerSpec) -> list[dict]:
    out = []
    for n, b in enumerate(result.b):
        bound = lambda_target(spec, n)
        ok, cert = _hodge_ok(b, spec, bound)
        out.append({"n": n, "bound": _fmt(bound), "pass": ok, "certificate": cert})
    return out


def order_report(result: FredholmResult, spec: TowerSpec) -> OrderReport:
    const = tower_constants(spec)
    d1 = const.delta1
    rep = OrderReport()
    for n, b in enumerate(result.b):
        lam = b.t_order()
        lam_unit = next((j for j, c in enumerate(b.coeffs) if c % spec.p), None)
        order = ord_R(b, spec)
        target = lambda_target(spec, n)
        hodge, cert = _hodge_ok(b, spec, target)
        rec = {
            "n": n,
            "lambda": lam if lam is not None else f">{b.N_T - 1}",
            "lambda_prime": lam_unit if lam_unit is not None else f">{b.N_T - 1}",
            "ord_R": str(order),
            "hodge_bound": _fmt(target),
            "hodge": bool(hodge),
            "certificate": cert,
        }
        if lam is not None and lam_unit is not None and lam > lam_unit:
            raise OracleViolation("lambda_n exceeds lambda'_n")
        if n % d1 in (0, 1):
            integral = target.denominator == 1
            unit_at_target = integral and target < b.N_T and b.coeffs[int(target)] % spec.p != 0
            rec["Lambda"] = _fmt(target)
            rec["exact_order"] = bool(integral and hodge and unit_at_target)
            rec["unit_at_Lambda"] = bool(unit_at_target)
        rep.records.append(rec)
    return rep


# --- specialisation T = zeta - 1 ---------------------------------------------


def specialize_T(series: TSeries, p: int, m: int) -> CycInt:
    """sum_j c_j (zeta_{p^m} - 1)^j, coefficients reduced mod p^{N_p}."""
    mod = p**series.N_p
    pi = psi_char(p, m, 1) - 1
    acc = CycInt.zero(p, m)
    power = CycInt.one(p, m)
    for c in series.coeffs:
        if c:
            acc = (acc + power * c).reduce_mod(mod)
        power = (power * pi).reduce_mod(mod)
    return acc


def specialization_cap(series: TSeries, p: int, m: int) -> int:
    """ord_pi below which a specialised value is certified: min(N_T, N_p * phi(p^m))."""
    return min(series.N_T, series.N_p * (p - 1) * p ** (m - 1))


def agree_mod_cap(x: CycInt, y: CycInt, cap: int) -> bool:
    diff = x - y
    return diff.is_zero() or pi_valuation(diff) >= cap


# --- precision policy and pipeline ------------------------------------------------


@dataclass(frozen=True)
class DworkPrecision:
    N_s: int
    N_T: int
    N_p: int
    B: int
    guard: int

    @property
    def working_p(self) -> int:
        return self.N_p + self.guard

    def to_json(self) -> dict:
        return {"N_s": self.N_s, "N_T": self.N_T, "N_p": self.N_p, "B": self.B, "guard": self.guard}


def _guard_digits(p: int, N_s: int) -> int:
    return sum(int(v_p(n, p)) for n in range(1, N_s + 1))


def default_precision(spec: TowerSpec, N_s: int | None = None, N_T=None, N_p=None, B=None) -> DworkPrecision:
    const = tower_constants(spec)
    if N_s is None:
        N_s = 2 * const.delta1 + 1
    lam = lambda_target(spec, N_s)
    lam = math.ceil(lam)
    if N_T is None:
        N_T = lam + const.delta1 + 2
    if N_p is None:
        if const.m_tilde >= 2:
            w = (spec.p - 1) * spec.p ** (const.m_tilde - 2)
            N_p = -(-N_T // w) + 2
        else:
            N_p = N_T
    if B is None:
        B = const.D * N_T + const.D
    B = max(B, 2 * N_s)
    return DworkPrecision(N_s, N_T, N_p, B, _guard_digits(spec.p, N_s))


@dataclass
class DworkResult:
    spec: TowerSpec
    precision: DworkPrecision
    ef: EfCoefficients
    matrix: DworkMatrix
    fredholm: FredholmResult


def run_dwork(spec: TowerSpec, precision: DworkPrecision) -> DworkResult:
    Nw = precision.working_p
    ef = build_Ef(spec, precision.N_T, Nw, spec.p * precision.B)
    mx = dwork_matrix(spec, precision.N_T, Nw, precision.B, ef)
    fr = fredholm(mx, precision.N_s, precision.N_p)
    return DworkResult(spec, precision, ef, mx, fr)


def _certified_view(report: OrderReport) -> dict:
    """The parts of an order report that a larger precision may not change."""
    view = {}
    for r in report.records:
        entry = {}
        for key in ("lambda", "lambda_prime"):
            if isinstance(r[key], int):
                entry[key] = r[key]
        if not r["ord_R"].startswith(">="):
            entry["ord_R"] = r["ord_R"]
        if not r["certificate"].startswith("beyond"):
            entry["hodge"] = r["hodge"]
            if "exact_order" in r:
                entry["exact_order"] = r["exact_order"]
        view[r["n"]] = entry
    return view


def truncation_stability(
    spec: TowerSpec,
    precision: DworkPrecision,
    base: DworkResult | None = None,
    params=("B", "N_T", "N_p"),
) -> dict:
    """Double each parameter in ``params`` on its own and recompute.

    The b_n reduced back to the base precision must not move, and every
    certified order in the base report must reappear unchanged.
    """
    if base is None:
        base = run_dwork(spec, precision)
    base_view = _certified_view(order_report(base.fredholm, spec))
    runs = {}
    for name in params:
        wide = replace(precision, **{name: 2 * getattr(precision, name)})
        big = run_dwork(spec, wide)
        moved = [
            n
            for n, (x, y) in enumerate(zip(base.fredholm.b, big.fredholm.b))
            if y.truncate(precision.N_T, precision.N_p) != x
        ]
        big_view = _certified_view(order_report(big.fredholm, spec))
        changed = [
            n for n, entry in base_view.items() if any(big_view[n].get(k) != v for k, v in entry.items())
        ]
        runs[name] = {"pass": not moved and not changed, "moved": moved, "orders_changed": changed, "precision": wide.to_json()}
    return {"pass": all(r["pass"] for r in runs.values()), "base": precision.to_json(), "doubled": runs}


def lf_newton_check(result: FredholmResult, q: int) -> bool:
    """L_f(T, s) = C_f(T, s) / C_f(T, qs) satisfies n l_n = sum_k S_f(T, k) l_{n-k}, S_f(T, k) = (q^k - 1) Tr(M_a^k)."""
    p, NT, N = result.p, result.N_T, result.N_p
    mod = p**N
    b = [list(x.coeffs) for x in result.b]
    c_q = [[c * q**n % mod for c in bn] for n, bn in enumerate(b)]
    ell = []
    for n in range(len(b)):
        # C(s) = L(s) C(qs); C(qs) has constant term 1
        acc = list(b[n])
        for k in range(n):
            prod = _series_mul(ell[k], c_q[n - k], NT, mod)
            acc = [x - y for x, y in zip(acc, prod)]
        ell.append([x % mod for x in acc])
    for n in range(1, len(b)):
        rhs = [0] * NT
        for k in range(1, n + 1):
            s_k = [(q**k - 1) * c for c in result.traces[k - 1].coeffs]
            rhs = [x + y for x, y in zip(rhs, _series_mul(s_k, ell[n - k], NT, mod))]
        if any((n * x - y) % mod for x, y in zip(ell[n], rhs)):
            return False
    return True
