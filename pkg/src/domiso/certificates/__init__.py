"""Interval certificates for the numeric inequalities and the exceptional-product search."""

from .engine import (CompileError, InequalityCert, Region, certify_box, certify_rational_tail,
                     compile_iv)
from .exceptions import (ExceptionRecord, classify, cutoffs, enumerate_exceptions, epsilon0,
                         listing_key, threshold)
from .registry import REGISTRY, SUITES, run_suite, suite_ids, suite_verdict, verify_inequality

__all__ = [
    "CompileError", "InequalityCert", "Region", "certify_box", "certify_rational_tail", "compile_iv",
    "ExceptionRecord", "classify", "cutoffs", "enumerate_exceptions", "epsilon0", "listing_key",
    "threshold",
    "REGISTRY", "SUITES", "run_suite", "suite_ids", "suite_verdict", "verify_inequality",
]
