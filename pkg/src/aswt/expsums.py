"""Tower data, derived constants, non-degeneracy, and exponential sums S*(psi, k).

Two independent routes compute the trace residue Tr(f^{(m)}(x)) in Z/p^m for
every x in F_{q^k}^*:

* ``witt``: Witt-vector arithmetic over F_{q^k} followed by the canonical
  isomorphism W_m(F_p) -> Z/p^m;
* ``galois``: Teichmüller lifts into GR(p^m, ak) and the ring trace.

The exponential sum is then sum_c count(c) * zeta^c with psi(1) = zeta.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np

from .cyclotomic import CycInt, psi_char
from .galois_ring import FieldCtx, FieldElem, embed, eval_fhat, field_ctx, gr_construct
from .witt import MAX_LENGTH, build_fm, build_structure_polys, evaluate_fm, nu_to_zmod, witt_trace

__all__ = [
    "TowerSpec",
    "TowerConstants",
    "ExpSumTable",
    "tower_constants",
    "nondegenerate",
    "exp_sum",
    "exp_sum_table",
    "trace_counts",
    "trace_residues",
    "psi_frob0",
    "load_tower",
    "ceil_log",
    "thread_count",
]


class TowerError(ValueError):
    """Invalid or degenerate tower data."""


@dataclass(eq=False)
class TowerSpec:
    """Rows i -> (a_{i0}, ..., a_{i d_i}) with entries in F_q, q = p^a."""

    p: int
    a: int
    rows: dict[int, tuple[FieldElem, ...]]
    name: str = ""

    def __post_init__(self):
        self.field = field_ctx(self.p, self.a)
        rows = {}
        for i, coeffs in sorted(self.rows.items()):
            if i < 0:
                raise TowerError(f"row index {i} is negative")
            cs = tuple(self.field(c) for c in coeffs)
            if not cs:
                continue
            if len(cs) > 1 and cs[-1].is_zero():
                raise TowerError(f"row {i}: leading coefficient a_{{{i},{len(cs) - 1}}} is zero")
            if all(c.is_zero() for c in cs):
                continue
            rows[i] = cs
        self.rows = rows
        if self.degree(0) <= 0:
            raise TowerError("d_0 must be positive")

    @classmethod
    def from_config(cls, data: dict) -> TowerSpec:
        p = int(data["p"])
        a = int(data.get("a", 1))
        rows = {}
        for row in data["rows"]:
            i = int(row["i"])
            if i in rows:
                raise TowerError(f"row {i} listed twice")
            rows[i] = tuple(c if isinstance(c, int) else tuple(c) for c in row["coeffs"])
        return cls(p, a, rows, name=str(data.get("name", "")))

    def to_config(self) -> dict:
        def enc(c: FieldElem):
            return c.coeffs[0] if self.a == 1 else list(c.coeffs)

        return {
            "p": self.p,
            "a": self.a,
            "rows": [{"i": i, "coeffs": [enc(c) for c in row]} for i, row in sorted(self.rows.items())],
        }

    @property
    def q(self) -> int:
        return self.p**self.a

    def degree(self, i: int) -> int:
        row = self.rows.get(i)
        return len(row) - 1 if row else 0

    @property
    def last_row(self) -> int:
        return max(self.rows)

    def coeff(self, i: int, u: int) -> FieldElem:
        row = self.rows.get(i, ())
        return row[u] if u < len(row) else self.field.zero

    def d(self, m: int) -> int:
        """Degree of L*(psi, s) for a character of conductor p^m."""
        return max(self.p ** (m - i - 1) * self.degree(i) for i in range(m))

    def __repr__(self) -> str:
        body = ", ".join(f"f_{i}={[c.coeffs if self.a > 1 else c.coeffs[0] for c in r]}" for i, r in self.rows.items())
        return f"TowerSpec(p={self.p}, a={self.a}, {body})"


def ceil_log(p: int, x: Fraction) -> int:
    """Smallest integer e with p^e >= x, for a positive rational x."""
    x = Fraction(x)
    if x <= 0:
        raise ValueError("argument must be positive")
    e = 0
    while Fraction(p) ** e < x:
        e += 1
    while Fraction(p) ** (e - 1) >= x:
        e -= 1
    return e


@dataclass(frozen=True)
class TowerConstants:
    D: int
    delta: Fraction
    m_tilde: int
    delta1: int
    m0: int
    m0_formula: int
    m0_clamped: bool
    d_of_m: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "D": self.D,
            "delta": f"{self.delta.numerator}/{self.delta.denominator}",
            "m_tilde": self.m_tilde,
            "delta1": self.delta1,
            "m0": self.m0,
            "m0_formula": self.m0_formula,
            "m0_clamped": self.m0_clamped,
            "d": {str(m): d for m, d in sorted(self.d_of_m.items())},
        }


def tower_constants(spec: TowerSpec, levels=()) -> TowerConstants:
    p, a = spec.p, spec.a
    degrees = {i: spec.degree(i) for i in range(spec.last_row + 1)}
    D = max(degrees.values())
    delta = max(Fraction(d, p**i) for i, d in degrees.items())
    m_tilde = 1 + min(i for i, d in degrees.items() if d == D)
    delta1 = max(p ** (m_tilde - 1 - i) * degrees[i] for i in range(m_tilde))
    if Fraction(delta1) != p ** (m_tilde - 1) * delta:
        raise AssertionError(f"delta1={delta1} disagrees with p^(m~-1)*delta={p ** (m_tilde - 1) * delta}")
    arg = Fraction(1, p) + Fraction(a * (delta1 - 1) ** 2, 8 * delta1)
    m0_formula = m_tilde + ceil_log(p, arg)
    m0 = max(m_tilde, m0_formula)
    return TowerConstants(
        D=D,
        delta=delta,
        m_tilde=m_tilde,
        delta1=delta1,
        m0=m0,
        m0_formula=m0_formula,
        m0_clamped=m0 != m0_formula,
        d_of_m={m: spec.d(m) for m in levels},
    )


def nondegenerate(spec: TowerSpec, m: int) -> bool:
    """Nonvanishing of sum over maximising rows of d_i * a_{i,d_i}^{p^{m-i-1}}."""
    if m < 1:
        raise ValueError("m must be at least 1")
    d = spec.d(m)
    total = spec.field.zero
    for i in range(m):
        di = spec.degree(i)
        if di and spec.p ** (m - i - 1) * di == d:
            total = total + spec.coeff(i, di) ** (spec.p ** (m - i - 1)) * di
    return not total.is_zero()


# --- trace residues ---------------------------------------------------------


@lru_cache(maxsize=None)
def _fm_cached(spec: TowerSpec, m: int):
    return build_fm(spec, m)


def _witt_residues(spec: TowerSpec, m: int, F: FieldCtx, root_index: int = 0):
    if m > MAX_LENGTH:
        raise ValueError(f"witt route supports m <= {MAX_LENGTH}")
    emb = embed(spec.field, F, root_index)
    fm = _fm_cached(spec, m)
    polys = build_structure_polys(spec.p, m)
    for x in F.nonzero_elements():
        w = evaluate_fm(fm, x, emb)
        yield x, nu_to_zmod(witt_trace(w, F.n, polys), spec.p)


def _galois_residues(spec: TowerSpec, m: int, F: FieldCtx, root_index: int = 0):
    ring = gr_construct(spec.p, m, F.n)
    emb = embed(spec.field, F, root_index)
    for x in F.nonzero_elements():
        xhat = ring.teichmuller(x)
        yield x, ring.trace(eval_fhat(spec, m, xhat, emb))


def trace_residues(spec: TowerSpec, m: int, k: int, route: str = "galois", root_index: int = 0) -> dict:
    """Per-element residues x -> Tr(f^{(m)}(x)) in Z/p^m over F_{q^k}^*, element by element."""
    F = field_ctx(spec.p, spec.a * k)
    if route == "witt":
        return dict(_witt_residues(spec, m, F, root_index))
    if route == "galois":
        return dict(_galois_residues(spec, m, F, root_index))
    raise ValueError(f"unknown route {route!r}")


def _vector_counts(spec: TowerSpec, m: int, k: int, root_index: int = 0) -> np.ndarray:
    """Galois route over all of mu_{q^k - 1} at once, enumerated as powers of a lifted generator."""
    p = spec.p
    n = spec.a * k
    ring = gr_construct(p, m, n)
    pm = ring.pm
    F = ring.field
    N = F.order - 1
    emb = embed(spec.field, F, root_index)
    t = ring.teichmuller(F.generator)

    def mat(elem) -> np.ndarray:
        return ring.mult_matrix(elem).astype(np.int64)

    powers = np.zeros((N, n), dtype=np.int64)
    powers[0, 0] = 1
    filled = 1
    step = t
    while filled < N:
        take = min(filled, N - filled)
        powers[filled : filled + take] = (powers[:take] @ mat(step).T) % pm
        filled += take
        step = step * step
    last = ring(tuple(int(c) for c in powers[N - 1])) * t
    if last != ring.one:
        raise AssertionError("lifted generator does not have order q^k - 1")

    tau = np.array(ring.trace_vector(), dtype=np.int64)
    residues = np.zeros(N, dtype=np.int64)
    idx = np.arange(N, dtype=np.int64)
    for u in range(max(len(r) for r in spec.rows.values())):
        A = ring.zero
        for i, row in spec.rows.items():
            if i < m and u < len(row) and not row[u].is_zero():
                A = A + ring.teichmuller(emb(row[u])) * p**i
        if A.is_zero():
            continue
        ell = (mat(A).T @ tau) % pm
        vals = (powers @ ell) % pm
        residues = (residues + vals[(u * idx) % N]) % pm
    return np.bincount(residues, minlength=pm)


def trace_counts(spec: TowerSpec, m: int, k: int, route: str = "galois", root_index: int = 0) -> list[int]:
    """Histogram of trace residues over F_{q^k}^*: entry c counts x with Tr = c mod p^m."""
    if k < 1:
        raise ValueError("k must be positive")
    if route == "galois":
        return [int(c) for c in _vector_counts(spec, m, k, root_index)]
    counts = [0] * spec.p**m
    for c in trace_residues(spec, m, k, route, root_index).values():
        counts[c] += 1
    return counts


def exp_sum(spec: TowerSpec, m: int, k: int, route: str = "galois", root_index: int = 0) -> CycInt:
    """S*(psi, k) for the standard primitive character of conductor p^m."""
    if route == "both":
        a = exp_sum(spec, m, k, "witt", root_index)
        b = exp_sum(spec, m, k, "galois", root_index)
        if a != b:
            raise AssertionError(f"routes disagree for k={k}: witt={a} galois={b}")
        return a
    return CycInt.from_counts(spec.p, m, trace_counts(spec, m, k, route, root_index))


def psi_frob0(spec: TowerSpec, m: int) -> CycInt:
    """psi(Frob_0): the character value on the trace of f^{(m)}(0) from F_q down to F_p."""
    ring = gr_construct(spec.p, m, spec.a)
    acc = ring.zero
    for i, row in spec.rows.items():
        if i < m:
            acc = acc + ring.teichmuller(row[0]) * spec.p**i
    return psi_char(spec.p, m, ring.trace(acc))


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("ASWT_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class ExpSumTable:
    m: int
    sums: dict[int, CycInt]

    def check_bounds(self, q: int) -> bool:
        return all(abs(c) <= q**k for k, s in self.sums.items() for c in s.coeffs)


def exp_sum_table(
    spec: TowerSpec, m: int, k_max: int | None = None, route: str = "galois", threads: int | None = None
) -> ExpSumTable:
    """S*(psi, k) for k = 1..k_max (default d(m) + 2)."""
    if k_max is None:
        k_max = spec.d(m) + 2
    threads = threads or thread_count()
    ks = list(range(1, k_max + 1))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(lambda k: exp_sum(spec, m, k, route), ks))
    else:
        values = [exp_sum(spec, m, k, route) for k in ks]
    table = ExpSumTable(m, dict(zip(ks, values)))
    if not table.check_bounds(spec.q):
        raise AssertionError("an exponential sum exceeds the trivial bound q^k")
    return table


def load_tower(path) -> TowerSpec:
    """Read a tower from JSON or TOML: {p, a, rows: [{i, coeffs}]}."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".toml":
        try:
            import tomllib
        except ModuleNotFoundError:  # Python < 3.11
            import tomli as tomllib
        data = tomllib.loads(text)
    else:
        data = json.loads(text)
    return TowerSpec.from_config(data)
