"""Exact arithmetic: charts, rational functions, parsing, trigonometric polynomials."""
from .parser import parse_expr
from .ratfn import (
    Chart,
    RatFn,
    format_rational,
    partial_derivative,
    poly_to_str,
    same_chart,
    substitute,
    to_fraction,
    to_qq,
)
from .trig import TrigFraction, TrigPoly, Weight, trig_integrate

__all__ = [
    "Chart",
    "RatFn",
    "TrigFraction",
    "TrigPoly",
    "Weight",
    "format_rational",
    "parse_expr",
    "partial_derivative",
    "poly_to_str",
    "same_chart",
    "substitute",
    "to_fraction",
    "to_qq",
    "trig_integrate",
]
