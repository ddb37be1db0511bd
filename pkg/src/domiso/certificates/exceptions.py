"""Balanced products whose lonely-part density bound fails.

For ``G = prod K[u_i, t_i]`` with ``t_1 >= ... >= t_n >= 3`` and ``n >= 4``, put
``eps0 = 2^n / (u_1...u_n t_1...t_{n-1})``.  The density bound needs
``eps0 < 1 - t_n omega(t_n)``.  For ``t_n >= 4`` it always holds (certificate ids
``thm7-density-t4`` and ``thm7-density-tail``), and for ``n >= 8`` it holds when
``t_n = 3`` (``thm7-eps0-n-ge-8``).  So failures have ``t_n = 3`` and ``4 <= n <= 7``.

With ``t_n = 3`` fixed, ``eps0 = 2^n * 3 / |V|`` is symmetric in the factors and
strictly decreasing in every ``u_i`` and in every ``t_i`` that is raised above 3.  Raising one factor from ``K_3`` while the others stay ``K_3``
gives the cutoffs ``t_1 <= 2^n / (3^(n-2) thr)`` and ``prod u <= 2^n / (3^(n-1) thr)``.
The enumeration is exhaustive on the box one step past both cutoffs and asserts
that no failure touches the outer layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement

from ..errors import Indeterminate, PreconditionError
from ..graph import ProductSpec, format_spec
from ..intervals import DEFAULT_BITS, IntervalScalar, decide
from ..stability import omega_interval

MIN_N, MAX_N = 4, 7
SPECIAL = ProductSpec.balanced_product([(1, 3)] * 7)


def epsilon0(spec: ProductSpec) -> Fraction:
    """``2^n / (u_1...u_n t_1...t_{n-1})``, equal to ``2^n t_n / |V|``."""
    if not spec.balanced:
        raise PreconditionError("eps0 is defined for balanced products only")
    spec = spec.t_desc()
    denom = math.prod(f.u for f in spec.factors) * math.prod(f.t for f in spec.factors[:-1])
    return Fraction(2**spec.n, denom)


@lru_cache(maxsize=None)
def threshold(t_n: int, bits: int = DEFAULT_BITS) -> IntervalScalar:
    """``1 - t_n omega(t_n)`` as a certified interval."""
    return 1 - omega_interval(t_n, bits) * t_n


def _fails(eps0: Fraction, t_n: int) -> bool:
    """Certified ``eps0 >= threshold``."""
    def test(thr: IntervalScalar):
        if thr.certainly_le(eps0):
            return True
        if thr.certainly_gt(eps0):
            return False
        return None

    verdict, _ = decide(lambda bits: threshold(t_n, bits), test, what="eps0 versus the threshold")
    return verdict


@dataclass(frozen=True)
class ExceptionRecord:
    spec: ProductSpec
    n: int
    eps0: Fraction
    threshold: IntervalScalar
    verdict: str

    @property
    def name(self) -> str:
        return format_spec(self.spec)

    def to_json(self) -> dict:
        return {
            "spec": self.name,
            "canonical": self.spec.to_json()["factors"],
            "n": self.n,
            "eps0": f"{self.eps0.numerator}/{self.eps0.denominator}",
            "threshold": self.threshold.to_json(),
            "verdict": self.verdict,
        }


def classify(spec: ProductSpec) -> ExceptionRecord:
    """Verdict ``exceptional``, ``passes`` or ``special-case`` for one balanced product."""
    if not spec.balanced:
        raise PreconditionError("the exceptional list concerns balanced products")
    spec = spec.t_desc()
    t_n = min(spec.part_counts)
    if spec.n < MIN_N or t_n < 3:
        raise PreconditionError("the density argument needs n >= 4 and every t_i >= 3")
    eps0 = epsilon0(spec)
    thr = threshold(t_n)
    if not _fails(eps0, t_n):
        verdict = "passes"
    elif spec == SPECIAL:
        verdict = "special-case"
    else:
        verdict = "exceptional"
    return ExceptionRecord(spec, spec.n, eps0, thr, verdict)


def listing_key(spec: ProductSpec) -> tuple:
    """Order: n, then part counts (descending) lexicographically, then prod u, then the u's."""
    spec = spec.t_desc()
    us = tuple(f.u for f in spec.factors)
    return (spec.n, spec.part_counts, math.prod(us), tuple(-x for x in us))


def cutoffs(n: int) -> tuple[int, int]:
    """Largest ``t_1`` and largest ``prod u`` that can still fail, from one-factor deviations."""
    thr = threshold(3)
    t_max = _floor_div(Fraction(2**n, 3 ** (n - 2)), thr)
    u_max = _floor_div(Fraction(2**n, 3 ** (n - 1)), thr)
    return t_max, u_max


def _floor_div(num: Fraction, thr: IntervalScalar) -> int:
    lo, hi = num / thr.hi, num / thr.lo
    if math.floor(lo) != math.floor(hi) or hi == math.floor(hi):
        raise Indeterminate(f"cutoff {num}/threshold is not resolved at {thr.bits} bits")
    return math.floor(lo)


def _u_vectors(n: int, limit: int):
    """All ``(u_1..u_n)`` with product at most ``limit``."""
    def rec(k, prod):
        if k == n:
            yield ()
            return
        for u in range(1, limit // prod + 1):
            for rest in rec(k + 1, prod * u):
                yield (u,) + rest
    yield from rec(0, 1)


def _box(n: int):
    t_max, u_max = cutoffs(n)
    seen = set()
    for ts in combinations_with_replacement(range(t_max + 1, 2, -1), n):
        if ts[-1] != 3:
            continue
        for us in _u_vectors(n, u_max + 1):
            spec = ProductSpec.balanced_product(list(zip(us, ts))).t_desc()
            if spec not in seen:
                seen.add(spec)
                yield spec
    return


def enumerate_exceptions() -> list[ExceptionRecord]:
    """The failing products in listing order, followed by the ``K_3^7`` special record."""
    found = []
    for n in range(MIN_N, MAX_N + 1):
        t_max, u_max = cutoffs(n)
        for spec in _box(n):
            rec = classify(spec)
            if rec.verdict == "passes":
                continue
            us = math.prod(f.u for f in spec.factors)
            if max(spec.part_counts) > t_max or us > u_max:
                raise AssertionError(f"{rec.name} fails on the outer layer of the search box")
            found.append(rec)
    found.sort(key=lambda r: (r.verdict == "special-case", listing_key(r.spec)))
    return found
