"""Exact arithmetic on adelic curves over Q and real quadratic fields.

Heights, product formulas, the interpolating polynomial of Roth-type
arguments and small numerical experiments around them.
"""

from .adelic import AdelicCurve, LogValue, Place, abs_log, extend_places, product_formula_defect
from .exact_core import QFElement, QuadField, RealInterval, interval_log, parse_element
from .heights import height, height_logvalue

__version__ = "0.1.0"

__all__ = [
    "AdelicCurve",
    "LogValue",
    "Place",
    "QFElement",
    "QuadField",
    "RealInterval",
    "abs_log",
    "extend_places",
    "height",
    "height_logvalue",
    "interval_log",
    "parse_element",
    "product_formula_defect",
]
