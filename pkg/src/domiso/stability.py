"""Stability of large independent sets in products of balanced complete multipartite graphs.

``eta(t) = log t / log(t/(t-1))`` and the density threshold ``omega(t)`` are
certified intervals (exact where an identity allows).  The verifier searches all
fibers ``J_{a,j}`` for one that nearly contains a given independent set.

At ``eps = 0`` the strict inequalities of the stability statement cannot hold
(a maximum independent set is itself a fiber), so such sets are reported with
status ``extremal`` when they lie inside a fiber of a coordinate with minimal
part count.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .errors import Indeterminate, PreconditionError
from .graph import ProductGraph
from .intervals import (DEFAULT_BITS, IntervalScalar, decide, eta_power, evaluate, inv_eta_power,
                        iv, mp_eta, mp_inv_eta)
from .setops import VertexSet, fiber, is_sorted_set

ENUM_BUDGET = 64


def eta(t: int, bits: int = DEFAULT_BITS) -> IntervalScalar:
    if t < 2:
        raise PreconditionError("eta(t) needs t >= 2")
    if t == 2:
        return IntervalScalar.exact(1)
    return evaluate(lambda ctx: mp_eta(ctx, t), bits)


def mp_omega(ctx, t: int):
    """``omega(t)`` inside an interval context."""
    if t == 3:
        return iv(ctx, Fraction(37, 81)) - iv(ctx, Fraction(5, 81)) ** mp_inv_eta(ctx, 3) / 2
    if t == 4:
        return iv(ctx, Fraction(85, 256)) - iv(ctx, Fraction(7, 256)) ** mp_inv_eta(ctx, 4) / 3
    return iv(ctx, Fraction(4 * t - 3, t**3))


def omega(t: int, bits: int = DEFAULT_BITS) -> IntervalScalar | Fraction:
    """Interval for t in {3, 4}; the exact rational ``(4t-3)/t^3`` for t >= 5."""
    if t < 3:
        raise PreconditionError("omega(t) needs t >= 3")
    if t >= 5:
        return Fraction(4 * t - 3, t**3)
    return evaluate(lambda ctx: mp_omega(ctx, t), bits)


def omega_interval(t: int, bits: int = DEFAULT_BITS) -> IntervalScalar:
    w = omega(t, bits)
    return w if isinstance(w, IntervalScalar) else IntervalScalar.exact(w)


def exceeds_omega(mu: Fraction, t: int, start: int = DEFAULT_BITS) -> bool:
    """Certified ``mu > omega(t)``; raises Indeterminate if precision runs out."""
    mu = Fraction(mu)

    def test(w: IntervalScalar):
        if w.certainly_lt(mu):
            return True
        if w.certainly_ge(mu):
            return False
        return None

    verdict, _ = decide(lambda bits: omega_interval(t, bits), test, start=start,
                        what=f"density versus omega({t})")
    return verdict


def prop2_lower_bound(t_j: int, t_n: int, delta, bits: int = DEFAULT_BITS) -> IntervalScalar:
    """``1 - t_n/t_j - delta*t_n + (t_n/(t_j-1)) * (delta/(t_j-1))**(1/eta(t_n))``."""
    delta = Fraction(delta)
    if not t_j >= t_n >= 3:
        raise PreconditionError("needs t_j >= t_n >= 3")
    if not 0 <= delta <= 1:
        raise PreconditionError("delta must lie in [0, 1]")
    power = inv_eta_power(delta / (t_j - 1), t_n, bits)
    return Fraction(t_n, t_j - 1) * power + (1 - Fraction(t_n, t_j) - delta * t_n)


def stability_bound(t_n: int, eps, bits: int = DEFAULT_BITS) -> IntervalScalar:
    """``4 * eps**eta(t_n)``."""
    return 4 * eta_power(Fraction(eps), t_n, bits)


def _balanced_check(graph: ProductGraph) -> int:
    spec = graph.spec
    if not spec.balanced:
        raise PreconditionError("stability is only asserted for balanced factors")
    t_n = min(spec.part_counts)
    if t_n < 3:
        raise PreconditionError("stability needs every part count to be at least 3")
    return t_n


def _precondition(graph: ProductGraph, I: VertexSet) -> tuple[int, Fraction]:
    if I.graph != graph:
        raise PreconditionError("independent set lives on a different graph")
    t_n = _balanced_check(graph)
    if not I.is_independent():
        raise PreconditionError("the set is not independent")
    mu = I.measure()
    if not exceeds_omega(mu, t_n):
        raise PreconditionError(f"below threshold: measure {mu} does not exceed omega({t_n})")
    return t_n, mu


@dataclass(frozen=True)
class StabilityReport:
    spec: str
    I: VertexSet
    eps: Fraction
    j: int
    a: int
    delta: Fraction
    bound: IntervalScalar
    threshold: Fraction | None
    status: str

    def to_json(self) -> dict:
        return {
            "spec": self.spec,
            "I": self.I.to_hex(),
            "eps": _ratio(self.eps),
            "witness": {"j": self.j, "a": self.a},
            "delta": _ratio(self.delta),
            "bound_lo": self.bound.to_json()["lo"],
            "bound_hi": self.bound.to_json()["hi"],
            "threshold": None if self.threshold is None else _ratio(self.threshold),
            "status": self.status,
        }


def _ratio(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _strictly_below(delta: Fraction, bound_at) -> bool:
    def test(b: IntervalScalar):
        if b.is_exact:
            return delta < b.lo
        if delta < b.lo:
            return True
        if delta >= b.hi:
            return False
        return None

    verdict, _ = decide(bound_at, test, what="delta versus the stability bound")
    return verdict


def thm6_verify(graph: ProductGraph, I: VertexSet) -> StabilityReport:
    """Find a fiber ``J_{a,j}`` with ``t_j < t_n/(1-eps)`` and ``mu(I - J) < 4 eps^eta(t_n)``.

    Candidates are scanned by increasing ``delta`` then ``(j, a)``; the first
    one meeting both conditions is the witness.
    """
    from .graph import format_spec

    t_n, mu = _precondition(graph, I)
    eps = 1 - t_n * mu
    counts = graph.part_counts
    cands = []
    for j in range(1, graph.n + 1):
        for a in range(1, counts[j - 1] + 1):
            cands.append(((I - fiber(graph, a, j)).measure(), j, a))
    cands.sort()
    bound = stability_bound(t_n, eps)
    name = format_spec(graph.spec)
    if eps == 0:
        for delta, j, a in cands:
            if delta == 0 and counts[j - 1] == t_n:
                return StabilityReport(name, I, eps, j, a, delta, bound, None, "extremal")
        delta, j, a = cands[0]
        return StabilityReport(name, I, eps, j, a, delta, bound, None, "fail")
    threshold = Fraction(t_n) / (1 - eps)
    for delta, j, a in cands:
        if counts[j - 1] < threshold and _strictly_below(delta, lambda b: stability_bound(t_n, eps, b)):
            return StabilityReport(name, I, eps, j, a, delta, bound, threshold, "ok")
    delta, j, a = cands[0]
    return StabilityReport(name, I, eps, j, a, delta, bound, threshold, "fail")


def _complement_bron_kerbosch(nbr: tuple[int, ...], universe: int) -> Iterator[int]:
    """Maximal independent sets = maximal cliques of the complement, Tomita pivoting."""
    N = universe.bit_length()
    non = [universe & ~nbr[v] & ~(1 << v) for v in range(N)]

    def expand(R: int, P: int, X: int):
        if not P and not X:
            yield R
            return
        pivot_pool = P | X
        best_u, best_cnt = -1, -1
        m = pivot_pool
        while m:
            u = (m & -m).bit_length() - 1
            m &= m - 1
            cnt = bin(P & non[u]).count("1")
            if cnt > best_cnt:
                best_u, best_cnt = u, cnt
        branch = P & ~non[best_u]
        while branch:
            v = (branch & -branch).bit_length() - 1
            branch &= branch - 1
            yield from expand(R | (1 << v), P & non[v], X & non[v])
            P &= ~(1 << v)
            X |= 1 << v

    yield from expand(0, universe, 0)


def _greedy_parent(mask: int, nbr: tuple[int, ...], N: int) -> int:
    """Extend an independent set to a maximal one by adding vertices in index order."""
    blocked = mask
    m = mask
    while m:
        v = (m & -m).bit_length() - 1
        m &= m - 1
        blocked |= nbr[v]
    for v in range(N):
        if not blocked >> v & 1:
            mask |= 1 << v
            blocked |= nbr[v] | (1 << v)
    return mask


def enumerate_large_independent_sets(graph: ProductGraph, threshold, budget: int = ENUM_BUDGET
                                     ) -> Iterator[VertexSet]:
    """Every independent set of measure strictly above ``threshold``, each once.

    Maximal independent sets come from pivoting clique enumeration on the
    complement graph; their subsets above the threshold are emitted only from
    the canonical parent (greedy index-order extension), so nothing repeats.
    ``threshold`` may be a rational or an IntervalScalar (compared with certainty).
    """
    from .errors import BudgetExceeded

    if graph.size > budget:
        raise BudgetExceeded(f"{graph.size} vertices exceed the enumeration budget {budget}")
    nbr = graph.neighbor_masks()
    N = graph.size
    weights = [int(w) for w in graph.weight_array]
    total = graph.total_weight

    def above(weight: int) -> bool:
        m = Fraction(weight, total)
        if isinstance(threshold, IntervalScalar):
            if threshold.certainly_lt(m):
                return True
            if threshold.certainly_ge(m):
                return False
            raise Indeterminate(f"measure {m} straddles the threshold enclosure {threshold}")
        return m > Fraction(threshold)

    for M in _complement_bron_kerbosch(nbr, (1 << N) - 1):
        verts = [v for v in range(N) if M >> v & 1]
        full_w = sum(weights[v] for v in verts)
        if not above(full_w):
            continue

        def drop(k: int, mask: int, w: int):
            if _greedy_parent(mask, nbr, N) == M:
                yield mask
            for i in range(k, len(verts)):
                v = verts[i]
                nw = w - weights[v]
                if above(nw):
                    yield from drop(i + 1, mask & ~(1 << v), nw)

        for mask in drop(0, M, full_w):
            yield VertexSet.from_mask(graph, mask)


@dataclass(frozen=True)
class DichotomyEntry:
    j: int
    delta: Fraction
    small_limit: Fraction
    large_limit: Fraction
    branch: str


def lemma4_dichotomy_check(graph: ProductGraph, I: VertexSet) -> list[DichotomyEntry]:
    """Classify ``delta_j = mu(I - J_{1,j})`` as small, large, or middle (a violation)."""
    _precondition(graph, I)
    if not is_sorted_set(I):
        raise PreconditionError("the dichotomy is stated for sorted sets; use sort_relabel first")
    out = []
    for j in range(1, graph.n + 1):
        t = graph.part_counts[j - 1]
        delta = (I - fiber(graph, 1, j)).measure()
        small = Fraction(t - 1, t**5)
        large = Fraction((2 * t - 1) * (t - 1), t**4)
        branch = "small" if delta < small else "large" if delta > large else "middle"
        out.append(DichotomyEntry(j, delta, small, large, branch))
    return out


def prop2_holds(graph: ProductGraph, I: VertexSet) -> list[tuple[int, bool]]:
    """For a sorted independent set, check ``eps >= prop2_lower_bound`` at every coordinate."""
    t_n = _balanced_check(graph)
    if not I.is_independent() or not is_sorted_set(I):
        raise PreconditionError("the fiber lower bound is stated for sorted independent sets")
    eps = 1 - t_n * I.measure()
    out = []
    for j in range(1, graph.n + 1):
        t_j = graph.part_counts[j - 1]
        delta = (I - fiber(graph, 1, j)).measure()

        def test(b: IntervalScalar):
            if b.is_exact:
                return eps >= b.lo
            if eps >= b.hi:
                return True
            if eps < b.lo:
                return False
            return None

        verdict, _ = decide(lambda bits: prop2_lower_bound(t_j, t_n, delta, bits), test,
                            what="eps versus the fiber lower bound")
        out.append((j, verdict))
    return out
