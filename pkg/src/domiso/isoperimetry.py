"""Vertex isoperimetric profiles of products of complete multipartite graphs.

The profile is evaluated by the product recursion on factors sorted by
independence ratio (the last coordinate has the largest ratio).  An exhaustive
oracle over all subsets of the collapsed graph gives an independent check.

The power lower bound uses the exponent ``log(1 - beta) / log(beta)`` with both
logarithms taken of numbers below 1, so the exponent lies in ``(0, 1]``.  For
``beta = 1/t`` this is ``1/eta(t)``.  This reading makes the bound true on every
oracle value we computed, and it is tight at ``nu = beta**k`` where the bound is
exactly ``(1 - beta)**k``.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

import numpy as np

from .errors import BudgetExceeded, HypothesisViolation, PreconditionError
from .graph import ProductGraph, ProductSpec, build_collapsed
from .intervals import DEFAULT_BITS, IntervalScalar, decide, log_ratio_power
from .setops import VertexSet, fiber

ORACLE_BUDGET = 22


@dataclass(frozen=True)
class HypothesisCheck:
    holds: bool
    witness: frozenset[int] | None = None
    lhs: Fraction | None = None
    rhs: Fraction | None = None

    def __bool__(self) -> bool:
        return self.holds


def _odds(beta: Fraction) -> Fraction:
    return (1 - beta) / beta


def check_recursion_hypothesis(spec: ProductSpec) -> HypothesisCheck:
    """Ratio condition ``prod_{k in A} (1-b_k)/b_k >= (1-b_n)/b_n`` for every nonempty A.

    Coordinates are taken in beta-ascending order; the witness uses 1-based
    positions in that order.  Subsets are scanned by size, then lexicographically.
    """
    betas = spec.beta_asc().betas
    n = len(betas)
    rhs = _odds(betas[-1])
    for size in range(1, n):
        for A in combinations(range(1, n), size):
            lhs = math.prod((_odds(betas[k - 1]) for k in A), start=Fraction(1))
            if lhs < rhs:
                return HypothesisCheck(False, frozenset(A), lhs, rhs)
    return HypothesisCheck(True)


def _require_hypothesis(spec: ProductSpec):
    check = check_recursion_hypothesis(spec)
    if not check:
        raise HypothesisViolation(
            f"ratio condition fails for A={sorted(check.witness)}: {check.lhs} < {check.rhs}; "
            "the recursive profile formula is not asserted for this product",
            check.witness)


def _check_nu(nu) -> Fraction:
    nu = Fraction(nu)
    if not 0 <= nu <= 1:
        raise PreconditionError(f"nu={nu} outside [0, 1]")
    return nu


def _eval(betas: tuple[Fraction, ...], nu: Fraction) -> Fraction:
    if nu == 0:
        return Fraction(0)
    b = betas[-1]
    if len(betas) == 1:
        return 1 - b if nu <= b else Fraction(1)
    rest = betas[:-1]
    if nu <= b:
        return (1 - b) * _eval(rest, nu / b)
    return 1 - b + b * _eval(rest, (nu - b) / (1 - b))


def profile_eval(spec: ProductSpec, nu) -> Fraction:
    """Exact profile value by the product recursion."""
    nu = _check_nu(nu)
    _require_hypothesis(spec)
    return _eval(spec.beta_asc().betas, nu)


@dataclass(frozen=True)
class ProfileSteps:
    """``value[k]`` holds on ``(threshold[k-1], threshold[k]]``; the profile is 0 at 0."""

    steps: tuple[tuple[Fraction, Fraction], ...]

    @property
    def thresholds(self) -> list[Fraction]:
        return [s for s, _ in self.steps]

    @property
    def values(self) -> list[Fraction]:
        return [v for _, v in self.steps]

    def __call__(self, nu) -> Fraction:
        nu = _check_nu(nu)
        if nu == 0:
            return Fraction(0)
        return self.steps[bisect_left(self.thresholds, nu)][1]

    def probe_points(self) -> list[Fraction]:
        """Every threshold and every midpoint between consecutive thresholds (and 0)."""
        pts = []
        prev = Fraction(0)
        for s in self.thresholds:
            pts += [(prev + s) / 2, s]
            prev = s
        return pts


def _merge(steps: list[tuple[Fraction, Fraction]]) -> list[tuple[Fraction, Fraction]]:
    out: list[tuple[Fraction, Fraction]] = []
    prev = Fraction(0)
    for s, v in steps:
        if s <= prev:
            continue
        if out and out[-1][1] == v:
            out[-1] = (s, v)
        else:
            out.append((s, v))
        prev = s
    return out


def _steps(betas: tuple[Fraction, ...]) -> list[tuple[Fraction, Fraction]]:
    b = betas[-1]
    if len(betas) == 1:
        return _merge([(b, 1 - b), (Fraction(1), Fraction(1))])
    prev = _steps(betas[:-1])
    low = [(b * s, (1 - b) * v) for s, v in prev]
    high = [(b + (1 - b) * s, 1 - b + b * v) for s, v in prev] if b < 1 else []
    return _merge(low + high)


def profile_steps(spec: ProductSpec) -> ProfileSteps:
    _require_hypothesis(spec)
    return ProfileSteps(tuple(_steps(spec.beta_asc().betas)))


def _doubling(values: np.ndarray, combine) -> np.ndarray:
    """Table over all masks of ``len(values)`` bits built by adding one bit at a time."""
    n = len(values)
    out = np.zeros(1 << n, dtype=values.dtype)
    for k in range(n):
        half = 1 << k
        out[half: 2 * half] = combine(out[:half], values[k])
    return out


@dataclass(frozen=True, eq=False)
class OracleTables:
    graph: ProductGraph
    set_weight: np.ndarray
    boundary_weight: np.ndarray

    @property
    def total(self) -> int:
        return self.graph.total_weight


@lru_cache(maxsize=4)
def _tables(spec: ProductSpec) -> OracleTables:
    g = build_collapsed(spec)
    N = g.size
    w = np.asarray([int(x) for x in g.weight_array], dtype=np.int64)
    nbr = np.asarray(g.neighbor_masks(), dtype=np.uint32)
    set_weight = _doubling(w, lambda prev, x: prev + x)
    nb = _doubling(nbr, lambda prev, x: prev | x)
    lo_bits = N // 2
    lo_tab = _doubling(w[:lo_bits], lambda prev, x: prev + x)
    hi_tab = _doubling(w[lo_bits:], lambda prev, x: prev + x)
    bw = lo_tab[nb & np.uint32((1 << lo_bits) - 1)] + hi_tab[nb >> np.uint32(lo_bits)]
    del nb
    for arr in (set_weight, bw):
        arr.setflags(write=False)
    return OracleTables(g, set_weight, bw)


def oracle_tables(spec: ProductSpec, budget: int = ORACLE_BUDGET) -> OracleTables:
    canon = spec.beta_asc()
    size = math.prod(canon.part_counts)
    if size > budget:
        raise BudgetExceeded(f"oracle needs 2^{size} subsets; budget is {budget} collapsed vertices")
    return _tables(canon)


@dataclass(frozen=True)
class OracleResult:
    value: Fraction
    witness: VertexSet
    witness_measure: Fraction


def _select(tables: OracleTables, mask: np.ndarray) -> int:
    cand = np.flatnonzero(mask)
    bw = tables.boundary_weight[cand]
    cand = cand[bw == bw.min()]
    ws = tables.set_weight[cand]
    cand = cand[ws == ws.max()]
    return int(cand[0])


def _threshold(nu: Fraction, total: int) -> int:
    return -((-nu.numerator * total) // nu.denominator)


def profile_oracle(spec: ProductSpec, nu, budget: int = ORACLE_BUDGET) -> OracleResult:
    """Exhaustive minimum of the boundary measure over sets of measure at least ``nu``.

    Among minimisers the witness has the largest measure, then the smallest
    bitmask.  The witness lives on the collapsed graph in beta-ascending order.
    """
    nu = _check_nu(nu)
    t = oracle_tables(spec, budget)
    best = _select(t, t.set_weight >= _threshold(nu, t.total))
    g = t.graph
    return OracleResult(
        Fraction(int(t.boundary_weight[best]), t.total),
        VertexSet.from_mask(g, best),
        Fraction(int(t.set_weight[best]), t.total),
    )


def nested_optimum_witness(spec: ProductSpec, nu, budget: int = ORACLE_BUDGET) -> VertexSet | None:
    """An optimal set for ``nu`` nested with the heaviest fiber of the last coordinate.

    Searches all subsets with the same measure and boundary measure as the
    oracle's witness for one that is contained in, or contains, ``J_{1,n}``.
    Returns None if there is none.
    """
    nu = _check_nu(nu)
    _require_hypothesis(spec)
    opt = profile_oracle(spec, nu, budget)
    t = oracle_tables(spec, budget)
    g = t.graph
    J = fiber(g, 1, g.n).to_mask()
    best = opt.witness.to_mask()
    same = (t.set_weight == t.set_weight[best]) & (t.boundary_weight == t.boundary_weight[best])
    masks = np.flatnonzero(same).astype(np.int64)
    nested = ((masks & J) == masks) | ((masks & J) == J)
    hits = masks[nested]
    if len(hits) == 0:
        return None
    return VertexSet.from_mask(g, int(hits[0]))


def corollary1_bound(nu, beta, bits: int = DEFAULT_BITS) -> IntervalScalar:
    """Enclosure of ``nu ** (log(1-beta) / log(beta))`` for ``0 < beta <= 1/2``."""
    nu, beta = _check_nu(nu), Fraction(beta)
    if not 0 < beta <= Fraction(1, 2):
        raise PreconditionError("the power bound needs 0 < beta <= 1/2")
    if nu == 0:
        return IntervalScalar.exact(0)
    if beta == Fraction(1, 2):
        return IntervalScalar.exact(nu)
    return log_ratio_power(nu, beta, 1 - beta, bits)


def corollary1_holds(spec: ProductSpec, nu) -> bool:
    """Certified comparison of the exact profile value against the power bound."""
    nu = _check_nu(nu)
    canon = spec.beta_asc()
    betas = canon.betas
    if betas[-1] > Fraction(1, 2):
        raise PreconditionError("the power bound needs every ratio at most 1/2")
    value = profile_eval(canon, nu)

    def test(bound: IntervalScalar):
        if bound.is_exact:
            return value >= bound.lo
        if value > bound.hi:
            return True
        if value < bound.lo:
            return False
        return None

    verdict, _ = decide(lambda bits: corollary1_bound(nu, betas[-1], bits), test,
                        what="profile versus power bound")
    return verdict
