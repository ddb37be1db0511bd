"""Exact independence, upper domination and upper irredundance numbers.

Searches run over Python-int bitmasks, include-first in vertex index order, so
the first optimum found is the lexicographically smallest one and ties never
depend on timing.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import product

import numpy as np
import sympy

from .errors import BudgetExceeded, PreconditionError
from .graph import ProductGraph
from .setops import VertexSet

EXHAUSTIVE_BUDGET = 64


def _lowbits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass
class SolveReport:
    param: str
    value: int
    witness: VertexSet
    optimal: bool
    nodes: int
    millis: float
    prunes: dict = field(default_factory=dict)

    def to_json(self, timing: bool = True) -> dict:
        out = {"param": self.param, "value": self.value, "witness": self.witness.to_hex(),
               "optimal": self.optimal, "nodes": self.nodes}
        if timing:
            out["millis"] = round(self.millis, 3)
        return out


class _Clock:
    def __init__(self, timeout: float | None):
        self.deadline = None if timeout is None else time.monotonic() + timeout
        self.expired = False

    def tick(self, nodes: int) -> bool:
        if self.deadline is not None and nodes % 256 == 0 and time.monotonic() > self.deadline:
            self.expired = True
        return self.expired


def _check_budget(graph: ProductGraph, budget: int):
    if graph.size > budget:
        raise BudgetExceeded(f"{graph.size} vertices exceed the solver budget {budget}")


def _clique_cover_bound(cand: int, nbr: tuple[int, ...]) -> int:
    """Number of greedy cliques covering ``cand``; each holds at most one vertex of an independent set."""
    count = 0
    while cand:
        v = (cand & -cand).bit_length() - 1
        clique = cand & nbr[v]
        cand &= ~(1 << v)
        while clique:
            w = (clique & -clique).bit_length() - 1
            cand &= ~(1 << w)
            clique &= nbr[w]
        count += 1
    return count


def _shift_cliques(graph: ProductGraph) -> list[int]:
    """Clique partition for factors with equal part sizes.

    Shifting every part label by one (keeping the position inside the part) sends
    each vertex to a neighbour.  Every orbit has length lcm(t_i), a multiple of
    the smallest part count t, and any t consecutive orbit points differ in every
    coordinate, so cutting orbits into runs of t gives |V|/t disjoint cliques.
    """
    succ_per_coord = []
    for j, f in enumerate(graph.spec.factors):
        labels = graph.labels[j]
        starts: dict[int, int] = {}
        for c, part in enumerate(labels):
            starts.setdefault(part, c)
        succ_per_coord.append([starts[(labels[c] + 1) % f.t] + c - starts[labels[c]]
                               for c in range(len(labels))])
    coords = graph.coords
    succ = np.zeros(graph.size, dtype=np.int64)
    for j in range(graph.n):
        succ = succ * graph.radices[j] + np.asarray(succ_per_coord[j])[coords[:, j]]
    run = min(graph.part_counts)
    seen = np.zeros(graph.size, dtype=bool)
    cliques = []
    for v in range(graph.size):
        if seen[v]:
            continue
        orbit = []
        w = v
        while not seen[w]:
            seen[w] = True
            orbit.append(w)
            w = int(succ[w])
        for k in range(0, len(orbit), run):
            cliques.append(sum(1 << x for x in orbit[k:k + run]))
    return cliques


def _greedy_cliques(graph: ProductGraph, nbr: tuple[int, ...]) -> list[int]:
    cand = (1 << graph.size) - 1
    cliques = []
    while cand:
        v = (cand & -cand).bit_length() - 1
        clique, ext = 1 << v, cand & nbr[v]
        while ext:
            w = (ext & -ext).bit_length() - 1
            clique |= 1 << w
            ext &= nbr[w]
        cand &= ~clique
        cliques.append(clique)
    return cliques


def root_clique_partition(graph: ProductGraph) -> list[int]:
    """Disjoint cliques covering V: structured when every factor is balanced, greedy otherwise."""
    if graph.spec.balanced:
        return _shift_cliques(graph)
    return _greedy_cliques(graph, graph.neighbor_masks(limit=max(4096, graph.size)))


def max_independent_set(graph: ProductGraph, budget: int = EXHAUSTIVE_BUDGET,
                        timeout: float | None = None) -> SolveReport:
    """Branch and bound; bounds count the root cliques meeting the candidates, then a greedy cover."""
    _check_budget(graph, budget)
    nbr = graph.neighbor_masks(limit=max(4096, graph.size))
    cliques = root_clique_partition(graph)
    start = time.perf_counter()
    clock = _Clock(timeout)
    # the first leaf of the include-first search is the greedy index-order set; start from it
    best_size, best_mask, blocked = 0, 0, 0
    for v in range(graph.size):
        if not blocked >> v & 1:
            best_size, best_mask = best_size + 1, best_mask | (1 << v)
            blocked |= nbr[v] | (1 << v)
    nodes = 0
    prunes = {"partition": 0, "bound": 0}
    # explicit stack: the include branch is pushed last so it is explored first
    stack = [(0, 0, (1 << graph.size) - 1)]
    while stack:
        cur, size, cand = stack.pop()
        nodes += 1
        if clock.tick(nodes):
            break
        if size > best_size:
            best_size, best_mask = size, cur
        if not cand:
            continue
        if size + sum(1 for c in cliques if c & cand) <= best_size:
            prunes["partition"] += 1
            continue
        if size + _clique_cover_bound(cand, nbr) <= best_size:
            prunes["bound"] += 1
            continue
        v = (cand & -cand).bit_length() - 1
        rest = cand & ~(1 << v)
        stack.append((cur, size, rest))
        stack.append((cur | (1 << v), size + 1, rest & ~nbr[v]))

    return SolveReport("alpha", best_size, VertexSet.from_mask(graph, best_mask), not clock.expired,
                       nodes, (time.perf_counter() - start) * 1e3, prunes)


@dataclass(frozen=True)
class IrredundantCertificate:
    """Per member: None when lonely, otherwise its chosen private neighbour."""

    graph: ProductGraph
    members: tuple[int, ...]
    private: dict

    @property
    def lonely(self) -> tuple[int, ...]:
        return tuple(v for v in self.members if self.private[v] is None)

    @property
    def social(self) -> tuple[int, ...]:
        return tuple(v for v in self.members if self.private[v] is not None)


@dataclass(frozen=True)
class RedundancyWitness:
    """``vertex`` is the smallest redundant member; ``redundant`` lists all of them."""

    vertex: int
    redundant: tuple[int, ...]


def irredundance_certificate(S: VertexSet) -> IrredundantCertificate | RedundancyWitness:
    """Lonely/social split with smallest-index private neighbours, or a redundant vertex."""
    if S.is_empty():
        raise PreconditionError("irredundance certificate needs a nonempty set")
    g = S.graph
    nbr = g.neighbor_masks(limit=max(4096, g.size))
    smask = S.to_mask()
    private: dict[int, int | None] = {}
    bad = []
    for v in S.indices():
        if not nbr[v] & smask:
            private[v] = None
            continue
        pn = [w for w in _lowbits(nbr[v] & ~smask) if nbr[w] & smask == 1 << v]
        if pn:
            private[v] = pn[0]
        else:
            bad.append(v)
    if bad:
        return RedundancyWitness(bad[0], tuple(bad))
    return IrredundantCertificate(g, tuple(S.indices()), private)


def is_irredundant(S: VertexSet) -> bool:
    return S.is_empty() or isinstance(irredundance_certificate(S), IrredundantCertificate)


def irredundance_bounds(graph: ProductGraph, alpha: int) -> dict:
    """Upper bounds on IR: alpha + 2^n always, and the balanced ratio bounds."""
    bounds = {"alpha+2^n": alpha + 2**graph.n}
    spec = graph.spec
    if spec.balanced:
        t = sorted(spec.part_counts, reverse=True)
        if t[-1] >= 2:
            tn = t[-1]
            rest = 1
            for x in t[1:]:
                rest *= x
            bounds["alpha+2*t2..tn"] = alpha + 2 * rest
            bounds["tn^2/(2tn-1)*alpha"] = (tn * tn * alpha) // (2 * tn - 1)
    return bounds


def upper_irredundance(graph: ProductGraph, mode: str = "ir", budget: int = EXHAUSTIVE_BUDGET,
                       timeout: float | None = None) -> SolveReport:
    """Exact IR (``mode='ir'``) or upper domination number (``mode='gamma'``).

    Irredundance is hereditary, so the search never extends a redundant set.
    Bit-sliced counters track which vertices have exactly one closed neighbour in
    the current set; a member is fine iff its closed neighbourhood meets that set.
    """
    if mode not in ("ir", "gamma"):
        raise PreconditionError(f"unknown mode {mode!r}")
    _check_budget(graph, budget)
    alpha = max_independent_set(graph, budget).value
    cap = min(irredundance_bounds(graph, alpha).values())
    nbr = graph.neighbor_masks()
    closed = tuple(m | (1 << v) for v, m in enumerate(nbr))
    full = (1 << graph.size) - 1
    N = graph.size
    start = time.perf_counter()
    clock = _Clock(timeout)
    best = [0, 0]
    nodes = 0
    prunes = {"redundant": 0, "count": 0, "cap": 0}
    members: list[int] = []

    def search(v: int, cur: int, one: int, many: int):
        nonlocal nodes
        nodes += 1
        if clock.tick(nodes) or best[0] >= cap:
            if best[0] >= cap:
                prunes["cap"] += 1
            return
        size = len(members)
        if mode == "ir" or (one | many) == full:
            if size > best[0]:
                best[:] = [size, cur]
        if v == N:
            return
        if size + (N - v) <= best[0]:
            prunes["count"] += 1
            return
        M = closed[v]
        new_many = many | (one & M)
        new_one = (one & ~M) | (M & ~one & ~many)
        members.append(v)
        if all(closed[u] & new_one for u in members):
            search(v + 1, cur | (1 << v), new_one, new_many)
        else:
            prunes["redundant"] += 1
        members.pop()
        search(v + 1, cur, one, many)

    search(0, 0, 0, 0)
    return SolveReport(mode, best[0], VertexSet.from_mask(graph, best[1]), not clock.expired,
                       nodes, (time.perf_counter() - start) * 1e3, prunes)


def part_labels(graph: ProductGraph, v: int) -> tuple[int, ...]:
    """1-based part index of ``v`` in every coordinate."""
    return tuple(int(p) + 1 for p in graph.parts[v])


def rank_polynomial(graph: ProductGraph, p: int) -> list[int]:
    """Coefficients of ``prod_i (x_i - c_p(i))`` on the monomials ``prod_{i in A} x_i``.

    Monomials are indexed by the bitmask of A with coordinate 1 as the most
    significant bit; the coefficient for A is ``prod_{i not in A} (-c_p(i))``.
    """
    c = part_labels(graph, p)
    n = graph.n
    out = []
    for bits in product((0, 1), repeat=n):
        coef = 1
        for i, b in enumerate(bits):
            if not b:
                coef *= -c[i]
        out.append(coef)
    return out


def soc_rank_certificate(cert: IrredundantCertificate) -> int:
    """Rank of the private-neighbour polynomials of the social members."""
    rows = [rank_polynomial(cert.graph, cert.private[y]) for y in cert.social]
    if not rows:
        return 0
    return sympy.Matrix(rows).rank()

