"""Exact computations on direct products of complete multipartite graphs.

Domination-chain parameters, vertex isoperimetric profiles, compression and
folding, stability of large independent sets, and interval certificates for
the numeric inequalities behind them.
"""

from .errors import (BudgetExceeded, DomisoError, HypothesisViolation, Indeterminate,
                     PreconditionError, Refused, SpecSyntaxError, UniverseTooLarge)
from .graph import (PartiteFactor, ProductGraph, ProductSpec, alpha_formula, build_collapsed,
                    build_full, format_spec, parse_spec)
from .intervals import IntervalScalar
from .setops import VertexSet

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded", "DomisoError", "HypothesisViolation", "Indeterminate", "PreconditionError",
    "Refused", "SpecSyntaxError", "UniverseTooLarge",
    "PartiteFactor", "ProductGraph", "ProductSpec", "alpha_formula", "build_collapsed",
    "build_full", "format_spec", "parse_spec", "IntervalScalar", "VertexSet",
]
