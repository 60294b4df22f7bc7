"""Exact L-functions, Newton polygons and slope checks for Artin-Schreier-Witt towers."""

from .cyclotomic import CycInt, format_rational, norm, ord_p, ord_q, parse_rational, pi_valuation, psi_char
from .dwork import (
    DworkPrecision,
    TSeries,
    artin_hasse,
    build_Ef,
    default_precision,
    dwork_matrix,
    fredholm,
    hodge_check,
    ord_R,
    order_report,
    pi_series,
    run_dwork,
    specialize_T,
)
from .errors import OracleViolation, PrecisionError
from .expsums import (
    TowerConstants,
    TowerError,
    TowerSpec,
    exp_sum,
    exp_sum_table,
    load_tower,
    nondegenerate,
    psi_frob0,
    tower_constants,
    trace_residues,
)
from .galois_ring import FieldCtx, FieldElem, GaloisRing, embed, field_ctx, gr_construct
from .lseries import LPolynomial, compute_l, compute_lstar, cstar_truncated, l_from_lstar, lstar_from_sums
from .polygon import BoundLines, NewtonPolygon, check_bounds, newton_polygon, polygon_of, predicted_slopes, verify_stability
from .witt import WittVec, build_structure_polys, witt_add, witt_mul

__version__ = "0.1.0"

__all__ = [
    "BoundLines",
    "CycInt",
    "DworkPrecision",
    "FieldCtx",
    "FieldElem",
    "GaloisRing",
    "LPolynomial",
    "NewtonPolygon",
    "OracleViolation",
    "PrecisionError",
    "TSeries",
    "TowerConstants",
    "TowerError",
    "TowerSpec",
    "WittVec",
    "artin_hasse",
    "build_Ef",
    "build_structure_polys",
    "check_bounds",
    "compute_l",
    "compute_lstar",
    "cstar_truncated",
    "default_precision",
    "dwork_matrix",
    "embed",
    "exp_sum",
    "exp_sum_table",
    "field_ctx",
    "format_rational",
    "fredholm",
    "gr_construct",
    "hodge_check",
    "l_from_lstar",
    "load_tower",
    "lstar_from_sums",
    "newton_polygon",
    "nondegenerate",
    "norm",
    "ord_R",
    "ord_p",
    "ord_q",
    "order_report",
    "parse_rational",
    "pi_series",
    "pi_valuation",
    "polygon_of",
    "predicted_slopes",
    "psi_char",
    "psi_frob0",
    "run_dwork",
    "specialize_T",
    "tower_constants",
    "trace_residues",
    "verify_stability",
    "witt_add",
    "witt_mul",
]
