"""Command-line entry point: run a pipeline stage on a tower file and write a report.

Exit status: 0 when every check in the report passes, 1 when a check
fails, 2 on configuration or oracle errors (reported as JSON).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .cyclotomic import format_rational
from .errors import OracleViolation, PrecisionError
from .expsums import TowerError, TowerSpec, load_tower, nondegenerate, thread_count, tower_constants

__all__ = ["RunConfig", "Report", "build_parser", "run", "emit_report", "render", "main"]

COMMANDS = ("constants", "lfunction", "polygon", "cstar", "dwork", "verify-stability", "witt")


@dataclass
class RunConfig:
    command: str
    tower: TowerSpec | None = None
    m: int | None = None
    m_max: int | None = None
    N_p: int | None = None
    N_T: int | None = None
    N_s: int | None = None
    B: int | None = None
    route: str = "galois"
    out: Path | None = None
    fmt: str = "json"
    threads: int = 1
    p: int | None = None
    doubling: bool = False

    def levels(self, default_low: int) -> list[int]:
        low = self.m if self.m is not None else default_low
        high = self.m_max if self.m_max is not None else low
        if high < low:
            raise ValueError(f"--m-max {high} is below the first level {low}")
        return list(range(low, high + 1))


@dataclass
class Report:
    command: str
    data: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    slopes: dict = field(default_factory=dict)  # label -> list of Fractions, used by csv output

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {"command": self.command, "pass": self.passed, "checks": dict(self.checks), **self.data}


# --- subcommands ---------------------------------------------------------------


def _constants(cfg: RunConfig) -> Report:
    spec = cfg.tower
    levels = cfg.levels(1)
    const = tower_constants(spec, levels)
    rep = Report("constants", {"tower": spec.to_config(), "constants": const.to_json()})
    rep.data["nondegenerate"] = {str(m): nondegenerate(spec, m) for m in levels}
    return rep


def _lfunction(cfg: RunConfig) -> Report:
    from .lseries import compute_l, endpoint_holds

    spec = cfg.tower
    rep = Report("lfunction", {"levels": {}})
    for m in cfg.levels(1):
        lstar, l = compute_l(spec, m, cfg.route, cfg.threads)
        entry = {"lstar": lstar.to_json(), "l": l.to_json()}
        if lstar.nondegenerate:
            rep.checks[f"m{m}.degree"] = lstar.degree_confirmed
            rep.checks[f"m{m}.endpoint"] = endpoint_holds(lstar)
        else:
            entry["note"] = "degenerate level: degree and endpoint oracles skipped"
        rep.data["levels"][str(m)] = entry
        rep.slopes[f"m{m}"] = _slopes_of(l)
    return rep


def _slopes_of(lpoly) -> list[Fraction]:
    from .polygon import polygon_of

    return polygon_of(lpoly).slopes


def _polygon(cfg: RunConfig) -> Report:
    from .lseries import compute_l
    from .polygon import polygon_of

    spec = cfg.tower
    rep = Report("polygon", {"levels": {}})
    for m in cfg.levels(1):
        _, l = compute_l(spec, m, cfg.route, cfg.threads)
        poly = polygon_of(l)
        rep.data["levels"][str(m)] = poly.to_json()
        rep.slopes[f"m{m}"] = poly.slopes
    return rep


def _cstar_defaults(spec: TowerSpec, cfg: RunConfig) -> tuple[int, int]:
    from .polygon import BoundLines

    const = tower_constants(spec)
    N_s = cfg.N_s if cfg.N_s is not None else 2 * const.delta1 + 1
    if cfg.N_p is not None:
        return N_s, cfg.N_p
    # the certified cap, (N_p - 1)/a in these units at m = m_tilde, must clear the upper line at N_s
    top = BoundLines(const.delta1).upper(N_s)
    return N_s, spec.a * (int(top) + 1) + 2


def _cstar(cfg: RunConfig) -> Report:
    from .lseries import compute_lstar, cstar_truncated
    from .polygon import check_bounds

    spec = cfg.tower
    const = tower_constants(spec)
    N_s, N_p = _cstar_defaults(spec, cfg)
    unit = spec.a * (spec.p - 1) * spec.p ** (const.m_tilde - 1)
    rep = Report("cstar", {"N_s": N_s, "N_p": N_p, "unit_exponent": unit, "levels": {}})
    for m in cfg.levels(const.m_tilde):
        if m < const.m_tilde:
            raise ValueError(f"C* bounds need m >= m_tilde = {const.m_tilde}")
        lstar = compute_lstar(spec, m, cfg.route, cfg.threads)
        trunc = cstar_truncated(lstar, N_s, N_p)
        result = check_bounds(trunc.points(unit), Fraction(trunc.cap, unit), const.delta1, N_s)
        rep.data["levels"][str(m)] = result
        rep.checks[f"m{m}.bounds"] = result["bounds_hold"]
        rep.checks[f"m{m}.certified"] = result["certified"]
        rep.slopes[f"m{m}"] = [_parse(s) for s in result["polygon"]["slopes"]]
    return rep


def _dwork(cfg: RunConfig) -> Report:
    from . import dwork as dw
    from .expsums import exp_sum
    from .lseries import compute_lstar, cstar_truncated

    spec = cfg.tower
    const = tower_constants(spec)
    prec = dw.default_precision(spec, cfg.N_s, cfg.N_T, cfg.N_p, cfg.B)
    res = dw.run_dwork(spec, prec)
    fr = res.fredholm
    orders = dw.order_report(fr, spec)
    rep = Report("dwork", {"precision": prec.to_json(), "order_report": orders.to_json()})
    rep.data["b"] = [b.to_json() for b in fr.b]
    hodge = dw.hodge_check(fr, spec)
    rep.data["hodge"] = hodge
    rep.checks["hodge"] = all(h["pass"] is not False for h in hodge)
    rep.checks["exact_order"] = all(r.get("exact_order", True) for r in orders.records)
    pis = dw.check_pi_decay(spec, prec.N_T, prec.working_p)
    alphas = dw.check_alpha_decay(res.ef)
    rep.checks["pi_decay"] = all(r["pass"] for r in pis)
    rep.checks["alpha_decay"] = all(r["pass"] for r in alphas)
    rep.checks["lf_newton"] = dw.lf_newton_check(fr, spec.q)
    spec_levels = {}
    for m in cfg.levels(const.m_tilde):
        lvl = {"trace": [], "cstar": []}
        for k in range(1, min(2, fr.N_s) + 1):
            tr = fr.traces[k - 1]
            lhs = dw.specialize_T(tr, spec.p, m) * (spec.q**k - 1)
            cap = dw.specialization_cap(tr, spec.p, m)
            ok = dw.agree_mod_cap(lhs, exp_sum(spec, m, k, cfg.route), cap)
            lvl["trace"].append({"k": k, "cap": cap, "pass": ok})
            rep.checks[f"m{m}.trace{k}"] = ok
        top = min(fr.N_s, 6)
        cs = cstar_truncated(compute_lstar(spec, m, cfg.route, cfg.threads), top, fr.N_p)
        for n in range(1, top + 1):
            b = fr.b[n]
            cap = min(dw.specialization_cap(b, spec.p, m), cs.cap)
            ok = dw.agree_mod_cap(dw.specialize_T(b, spec.p, m), cs.coeffs[n], cap)
            lvl["cstar"].append({"n": n, "cap": cap, "pass": ok})
            rep.checks[f"m{m}.cstar{n}"] = ok
        spec_levels[str(m)] = lvl
    rep.data["specialization"] = spec_levels
    if cfg.doubling:
        stab = dw.truncation_stability(spec, prec, res)
        rep.data["doubling"] = stab
        for name, r in stab["doubled"].items():
            rep.checks[f"doubling.{name}"] = r["pass"]
    return rep


def _verify_stability(cfg: RunConfig) -> Report:
    from .polygon import verify_stability

    spec = cfg.tower
    m0 = tower_constants(spec).m0
    low = cfg.m if cfg.m is not None else m0
    high = cfg.m_max if cfg.m_max is not None else low + 1
    verdict = verify_stability(spec, range(low, high + 1), cfg.route, cfg.threads)
    rep = Report("verify-stability", {"verdict": verdict.to_json()})
    rep.checks["slope_progression"] = verdict.passed
    for m, lvl in sorted(verdict.levels.items()):
        rep.slopes[f"m{m}.direct"] = [_parse(s) for s in lvl["direct"]]
        rep.slopes[f"m{m}.predicted"] = [_parse(s) for s in lvl["predicted"]]
    return rep


def _witt(cfg: RunConfig) -> Report:
    from .witt import build_structure_polys

    p = cfg.p if cfg.p is not None else (cfg.tower.p if cfg.tower else 2)
    m = cfg.m if cfg.m is not None else 2
    polys = build_structure_polys(p, m)
    rep = Report("witt", {"p": p, "m": m, "text": polys.format()})
    rep.checks["ghost_identity"] = polys.ghost_identity_holds()
    return rep


def _parse(s: str) -> Fraction:
    num, den = s.split("/")
    return Fraction(int(num), int(den))


HANDLERS = {
    "constants": _constants,
    "lfunction": _lfunction,
    "polygon": _polygon,
    "cstar": _cstar,
    "dwork": _dwork,
    "verify-stability": _verify_stability,
    "witt": _witt,
}


def run(cfg: RunConfig) -> Report:
    if cfg.command not in HANDLERS:
        raise ValueError(f"unknown command {cfg.command!r}")
    if cfg.command != "witt" and cfg.tower is None:
        raise ValueError("--tower is required")
    return HANDLERS[cfg.command](cfg)


# --- output ------------------------------------------------------------------


def _plain(obj):
    """Make a report JSON-safe with rationals as num/den strings."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, float):
        return format_rational(obj) if obj == float("inf") else format_rational(Fraction(obj))
    return obj


def render(report: Report | dict, fmt: str = "json") -> str:
    """Deterministic text of a report: sorted keys, exact rationals."""
    if fmt == "json":
        body = report.to_json() if isinstance(report, Report) else report
        return json.dumps(_plain(body), sort_keys=True, indent=2) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if isinstance(report, Report) and report.slopes:
        writer.writerow(["label", "num", "den"])
        for label in sorted(report.slopes):
            for s in report.slopes[label]:
                s = Fraction(s)
                writer.writerow([label, s.numerator, s.denominator])
        return buf.getvalue()
    writer.writerow(["check", "pass"])
    checks = report.checks if isinstance(report, Report) else report.get("checks", {})
    for name in sorted(checks):
        writer.writerow([name, "true" if checks[name] else "false"])
    return buf.getvalue()


def emit_report(report: Report | dict, fmt: str = "json", out: Path | None = None, stream=None) -> Path | None:
    """Write the report to ``out``/<command>.<fmt>, or to ``stream`` when no directory is given."""
    text = render(report, fmt)
    if out is None:
        (stream or sys.stdout).write(text)
        return None
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    name = report.command if isinstance(report, Report) else report.get("command", "report")
    path = out / f"{name}.{fmt}"
    path.write_text(text, encoding="utf-8")
    return path


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aswt", description="L-functions and slopes of Artin-Schreier-Witt towers.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--tower", type=Path, help="tower file (.json or .toml)")
    parser.add_argument("--m", "-m", type=int, help="conductor exponent (first level)")
    parser.add_argument("--m-max", type=int, help="last level of a range")
    parser.add_argument("--np", dest="N_p", type=int, help="p-adic precision")
    parser.add_argument("--nt", dest="N_T", type=int, help="T-adic precision")
    parser.add_argument("--ns", dest="N_s", type=int, help="number of s-coefficients")
    parser.add_argument("--B", dest="B", type=int, help="matrix truncation size")
    parser.add_argument("--route", choices=("witt", "galois", "both"), default="galois")
    parser.add_argument("--out", type=Path, help="output directory (default: stdout)")
    parser.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    parser.add_argument("--p", type=int, help="prime for the witt dump when no tower is given")
    parser.add_argument("--doubling", action="store_true", help="dwork: rerun with B, N_T, N_p doubled one at a time")
    return parser


def _check_overrides(cfg: RunConfig) -> None:
    for name in ("N_p", "N_T", "N_s", "B", "m", "m_max"):
        val = getattr(cfg, name)
        if val is not None and val < 1:
            raise ValueError(f"{name} must be positive, got {val}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        tower = load_tower(args.tower) if args.tower else None
        cfg = RunConfig(
            command=args.command,
            tower=tower,
            m=args.m,
            m_max=args.m_max,
            N_p=args.N_p,
            N_T=args.N_T,
            N_s=args.N_s,
            B=args.B,
            route=args.route,
            out=args.out,
            fmt=args.fmt,
            threads=thread_count(),
            p=args.p,
            doubling=args.doubling,
        )
        _check_overrides(cfg)
        report = run(cfg)
    except (OracleViolation, PrecisionError, TowerError, ValueError, KeyError, OSError) as exc:
        err = {"command": args.command, "error": {"type": type(exc).__name__, "message": str(exc)}}
        emit_report(err, "json", args.out)
        return 2
    emit_report(report, args.fmt, args.out)
    return 0 if report.passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
