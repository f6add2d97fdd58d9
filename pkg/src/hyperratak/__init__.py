"""Generalized hypergeometric functions pFq by stabilized, linear-complexity
Drummond and factorial Levin-type sequence transformations."""

from .driver import EvalOptions, Kind, pFq, pFq_guaranteed, transform_limit
from .drummond import EvalResult, Status, TransformCursor, drummond_cursor
from .hyperterm import HyperParams, OmegaKind, recurrence_polys
from .padeexp import pade_exp, unitarity_defect
from .weniger import WenigerCursor, weniger_cursor

__version__ = "0.1.0"

__all__ = [
    "EvalOptions",
    "EvalResult",
    "HyperParams",
    "Kind",
    "OmegaKind",
    "Status",
    "TransformCursor",
    "WenigerCursor",
    "drummond_cursor",
    "pFq",
    "pFq_guaranteed",
    "pade_exp",
    "recurrence_polys",
    "transform_limit",
    "unitarity_defect",
    "weniger_cursor",
]
