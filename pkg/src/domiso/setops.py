"""Dense vertex subsets of product graphs and the operators that act on them.

Everything here works on boolean membership arrays in mixed-radix order.
Compression, the pattern map and folding act on collapsed graphs only.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from pathlib import Path

import numpy as np

from .errors import PreconditionError, Refused
from .graph import ProductGraph, build_collapsed, build_full, format_spec, parse_spec

Pattern = tuple[int, ...]


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=bool)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class VertexSet:
    """Subset of a product graph's vertices stored as a read-only bool array."""

    graph: ProductGraph
    members: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.members, dtype=bool)
        if arr.shape != (self.graph.size,):
            raise PreconditionError(
                f"membership array of shape {arr.shape} does not match {self.graph.size} vertices")
        object.__setattr__(self, "members", _frozen(arr))

    @classmethod
    def empty(cls, graph: ProductGraph) -> VertexSet:
        return cls(graph, np.zeros(graph.size, dtype=bool))

    @classmethod
    def full(cls, graph: ProductGraph) -> VertexSet:
        return cls(graph, np.ones(graph.size, dtype=bool))

    @classmethod
    def from_indices(cls, graph: ProductGraph, indices) -> VertexSet:
        arr = np.zeros(graph.size, dtype=bool)
        idx = list(indices)
        for i in idx:
            if not 0 <= i < graph.size:
                raise PreconditionError(f"vertex index {i} outside universe")
        arr[idx] = True
        return cls(graph, arr)

    @classmethod
    def from_coords(cls, graph: ProductGraph, coords) -> VertexSet:
        """From 1-based coordinate tuples."""
        return cls.from_indices(graph, [graph.encode(c) for c in coords])

    @classmethod
    def from_mask(cls, graph: ProductGraph, mask: int) -> VertexSet:
        if mask < 0 or mask >> graph.size:
            raise PreconditionError("bitmask has bits outside the universe")
        raw = mask.to_bytes((graph.size + 7) // 8, "little")
        bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
        return cls(graph, bits[: graph.size].astype(bool))

    @classmethod
    def from_hex(cls, graph: ProductGraph, text: str) -> VertexSet:
        return cls.from_mask(graph, int(text.strip(), 16))

    def to_mask(self) -> int:
        return int.from_bytes(np.packbits(self.members, bitorder="little").tobytes(), "little")

    def to_hex(self) -> str:
        return format(self.to_mask(), "x")

    def indices(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.members)]

    def coords(self) -> list[tuple[int, ...]]:
        return [self.graph.decode(i) for i in self.indices()]

    def __len__(self) -> int:
        return int(self.members.sum())

    def __contains__(self, index: int) -> bool:
        return bool(self.members[index])

    def __iter__(self):
        return iter(self.indices())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VertexSet):
            return NotImplemented
        return self.graph == other.graph and bool(np.array_equal(self.members, other.members))

    def __hash__(self) -> int:
        return hash((self.graph, self.members.tobytes()))

    def __repr__(self) -> str:
        return f"VertexSet({self.graph!r}, {self.coords()})"

    def measure(self) -> Fraction:
        return self.graph.measure(self.members)

    def _check(self, other: VertexSet):
        if self.graph != other.graph:
            raise PreconditionError("vertex sets live on different graphs")

    def __or__(self, other: VertexSet) -> VertexSet:
        self._check(other)
        return VertexSet(self.graph, self.members | other.members)

    def __and__(self, other: VertexSet) -> VertexSet:
        self._check(other)
        return VertexSet(self.graph, self.members & other.members)

    def __sub__(self, other: VertexSet) -> VertexSet:
        self._check(other)
        return VertexSet(self.graph, self.members & ~other.members)

    def complement(self) -> VertexSet:
        return VertexSet(self.graph, ~self.members)

    def issubset(self, other: VertexSet) -> bool:
        self._check(other)
        return not bool(np.any(self.members & ~other.members))

    def is_empty(self) -> bool:
        return not bool(self.members.any())

    def with_vertex(self, index: int, present: bool = True) -> VertexSet:
        arr = self.members.copy()
        arr[index] = present
        return VertexSet(self.graph, arr)

    def is_independent(self) -> bool:
        return not bool(np.any(boundary(self).members & self.members))


def fiber(graph: ProductGraph, a: int, j: int) -> VertexSet:
    """``J_{a,j}``: vertices whose ``j``-th coordinate lies in part ``a`` (both 1-based)."""
    return VertexSet(graph, graph.fiber(a, j))


def _part_grid(S: VertexSet) -> np.ndarray:
    """Occupancy of S on the grid of part tuples (shape ``part_counts``)."""
    g = S.graph
    grid = np.zeros(g.part_counts, dtype=np.int64)
    if g.kind == "collapsed":
        grid.reshape(-1)[:] = S.members
    else:
        np.add.at(grid.reshape(-1), g.collapse_index[S.members], 1)
    return grid


def _boundary_grid(occupied: np.ndarray) -> np.ndarray:
    """Part tuples that differ in every coordinate from some occupied tuple.

    Inclusion-exclusion over the coordinates that are forced to agree:
    ``#{v : v_i != b_i for all i} = sum_A (-1)^|A| #{v : v_A = b_A}``.
    """
    n = occupied.ndim
    c = (occupied > 0).astype(np.int64)
    total = np.zeros(occupied.shape, dtype=np.int64)
    for agree in product((0, 1), repeat=n):
        summed_axes = tuple(i for i in range(n) if not agree[i])
        marg = c.sum(axis=summed_axes, keepdims=True) if summed_axes else c
        sign = -1 if sum(agree) % 2 else 1
        total += sign * np.broadcast_to(marg, occupied.shape)
    return total > 0


def boundary(S: VertexSet) -> VertexSet:
    """All vertices adjacent to at least one member of S (may intersect S)."""
    g = S.graph
    grid = _boundary_grid(_part_grid(S)).reshape(-1)
    if g.kind == "collapsed":
        return VertexSet(g, grid)
    return VertexSet(g, grid[g.collapse_index])


def closed_neighborhood(S: VertexSet) -> VertexSet:
    return S | boundary(S)


def _require_collapsed(T: VertexSet, what: str):
    if T.graph.kind != "collapsed":
        raise PreconditionError(f"{what} is defined on collapsed graphs only")


def compress(T: VertexSet, i: int) -> VertexSet:
    """Left-justify T inside every line parallel to coordinate ``i`` (1-based)."""
    _require_collapsed(T, "compression")
    g = T.graph
    if not 1 <= i <= g.n:
        raise PreconditionError(f"coordinate {i} outside 1..{g.n}")
    ax = i - 1
    grid = T.members.reshape(g.radices)
    counts = grid.sum(axis=ax, keepdims=True)
    shape = [1] * g.n
    shape[ax] = g.radices[ax]
    positions = np.arange(g.radices[ax]).reshape(shape)
    return VertexSet(g, (positions < counts).reshape(-1))


def is_compressed(T: VertexSet) -> bool:
    return all(compress(T, i) == T for i in range(1, T.graph.n + 1))


def _potential(T: VertexSet) -> int:
    return int(np.flatnonzero(T.members).sum())


def compress_fully(T: VertexSet) -> tuple[VertexSet, list[int]]:
    """Round-robin compressions ``c_1, ..., c_n`` until a full pass changes nothing.

    Returns the fixed point and the coordinates whose compression changed the set.
    Each effective step strictly lowers the sum of member indices.
    """
    _require_collapsed(T, "compression")
    applied: list[int] = []
    current = T
    while True:
        changed = False
        for i in range(1, current.graph.n + 1):
            nxt = compress(current, i)
            if nxt != current:
                assert _potential(nxt) < _potential(current), "compression potential did not drop"
                applied.append(i)
                current = nxt
                changed = True
        if not changed:
            return current, applied


def pattern_of(graph: ProductGraph, index: int) -> Pattern:
    """Bit i is 0 exactly when coordinate i sits in part 1."""
    return tuple(0 if p == 0 else 1 for p in graph.parts[index])


def pi_image(T: VertexSet) -> frozenset[Pattern]:
    _require_collapsed(T, "the pattern map")
    pats = (T.graph.parts[T.members] != 0).astype(np.int8)
    return frozenset(tuple(int(b) for b in row) for row in np.unique(pats, axis=0)) if len(pats) else frozenset()


def pi_preimage(graph: ProductGraph, patterns) -> VertexSet:
    bits = (graph.parts != 0).astype(np.int64)
    codes = bits @ (1 << np.arange(graph.n - 1, -1, -1))
    wanted = [sum(b << (graph.n - 1 - i) for i, b in enumerate(z)) for z in patterns]
    return VertexSet(graph, np.isin(codes, np.asarray(wanted, dtype=np.int64)))


def pattern_measure(graph: ProductGraph, z: Pattern) -> Fraction:
    """``rho`` of the pattern class of ``z``: factor ``beta_i`` where ``z_i = 0``, else ``1 - beta_i``."""
    out = Fraction(1)
    for b, beta in zip(z, graph.betas):
        out *= beta if b == 0 else 1 - beta
    return out


def negate(z: Pattern) -> Pattern:
    return tuple(1 - b for b in z)


def flip(z: Pattern, coords) -> Pattern:
    """``sigma_B``: complement the 1-based coordinates in ``coords``."""
    idx = {c - 1 for c in coords}
    return tuple(1 - b if k in idx else b for k, b in enumerate(z))


def compressed_boundary(T: VertexSet) -> tuple[VertexSet, Fraction]:
    """Boundary of a compressed set read off its pattern image, with its measure."""
    _require_collapsed(T, "the compressed boundary")
    if not is_compressed(T):
        raise PreconditionError("compressed_boundary needs a compressed set")
    targets = {negate(z) for z in pi_image(T)}
    rho = sum((pattern_measure(T.graph, w) for w in targets), Fraction(0))
    return pi_preimage(T.graph, targets), rho


def is_saturated(T: VertexSet) -> bool:
    """True when T is a union of whole pattern classes."""
    return pi_preimage(T.graph, pi_image(T)) == T


def fold(T: VertexSet, A) -> VertexSet:
    """Folding operator toward the last coordinate.

    ``F = {x in Pi(T): x_i = 0 on A, x_n = 1, sigma(x) not in Pi(T)}`` with
    ``sigma`` flipping ``A + {n}``; the result is the preimage of
    ``(Pi(T) - F) + sigma(F)``.  Input must be compressed or pattern-saturated.
    """
    _require_collapsed(T, "folding")
    g = T.graph
    n = g.n
    A = frozenset(A)
    if any(not 1 <= a <= n - 1 for a in A):
        raise PreconditionError(f"fold index set must lie in 1..{n - 1}")
    if not g.spec.is_beta_asc():
        raise PreconditionError("folding needs the beta-ascending coordinate order")
    if not (is_saturated(T) or is_compressed(T)):
        raise PreconditionError("fold needs a compressed (or pattern-saturated) set")
    P = pi_image(T)
    moved = A | {n}
    F = {x for x in P
         if all(x[i - 1] == 0 for i in A) and x[n - 1] == 1 and flip(x, moved) not in P}
    return pi_preimage(g, (P - F) | {flip(x, moved) for x in F})


def fiber_measures(S: VertexSet, j: int) -> list[Fraction]:
    g = S.graph
    return [(S & fiber(g, a, j)).measure() for a in range(1, g.part_counts[j - 1] + 1)]


def is_sorted_set(S: VertexSet) -> bool:
    """Fiber measures non-increasing in the part label along every coordinate."""
    for j in range(1, S.graph.n + 1):
        m = fiber_measures(S, j)
        if any(m[k] < m[k + 1] for k in range(len(m) - 1)):
            return False
    return True


def sort_relabel(S: VertexSet) -> tuple[ProductGraph, VertexSet, tuple[tuple[int, ...], ...]]:
    """Relabel parts within each coordinate so S becomes sorted.

    Returns the graph, the relabelled set and per coordinate the permutation
    ``perm[new_part - 1] = old_part`` (1-based).  Parts of different sizes are
    never exchanged; if sorting would require that, :class:`Refused` is raised.
    """
    g = S.graph
    perms = []
    value_maps = []
    for j in range(1, g.n + 1):
        m = fiber_measures(S, j)
        order = sorted(range(len(m)), key=lambda a: (-m[a], a))
        sizes = g.spec.factors[j - 1].part_sizes
        if any(sizes[old] != sizes[new] for new, old in enumerate(order)):
            raise Refused(
                f"sorting coordinate {j} would exchange parts of different sizes; "
                "sortedness is only meaningful when the exchanged parts have equal size")
        perms.append(tuple(a + 1 for a in order))
        new_of_old = {old: new for new, old in enumerate(order)}
        labels = g.labels[j - 1]
        starts = {}
        for c, part in enumerate(labels):
            starts.setdefault(part, c)
        vmap = np.empty(g.radices[j - 1], dtype=np.int64)
        for c, part in enumerate(labels):
            vmap[c] = starts[new_of_old[part]] + (c - starts[part])
        value_maps.append(vmap)
    new_idx = np.zeros(g.size, dtype=np.int64)
    for j in range(g.n):
        new_idx = new_idx * g.radices[j] + value_maps[j][g.coords[:, j]]
    arr = np.zeros(g.size, dtype=bool)
    arr[new_idx[S.members]] = True
    return g, VertexSet(g, arr), tuple(perms)


def _check_pair(full: ProductGraph, collapsed: ProductGraph):
    if full.kind != "full" or collapsed.kind != "collapsed":
        raise PreconditionError("expected a full graph and a collapsed graph")
    if full.spec.factors != collapsed.spec.factors:
        raise PreconditionError("full and collapsed graphs come from different specs")


def collapse_set(S: VertexSet, collapsed: ProductGraph | None = None) -> VertexSet:
    """Image of a full-graph set under the map sending each vertex to its part tuple."""
    collapsed = collapsed or build_collapsed(S.graph.spec)
    _check_pair(S.graph, collapsed)
    arr = np.zeros(collapsed.size, dtype=bool)
    arr[S.graph.collapse_index[S.members]] = True
    return VertexSet(collapsed, arr)


def fiber_preimage(T: VertexSet, full: ProductGraph | None = None) -> VertexSet:
    """All full-graph vertices whose part tuple lies in T."""
    full = full or build_full(T.graph.spec)
    _check_pair(full, T.graph)
    return VertexSet(full, T.members[full.collapse_index])


def write_subset(path: str | Path, S: VertexSet):
    Path(path).write_text(f"{format_spec(S.graph.spec)}\n{S.graph.kind}\n{S.to_hex()}\n")


def read_subset(path: str | Path) -> VertexSet:
    lines = Path(path).read_text().splitlines()
    if len(lines) < 3:
        raise PreconditionError("subset file needs three lines: spec, kind, hex mask")
    spec = parse_spec(lines[0])
    kind = lines[1].strip()
    if kind == "collapsed":
        graph = build_collapsed(spec)
    elif kind == "full":
        graph = build_full(spec)
    else:
        raise PreconditionError(f"unknown graph kind {kind!r}")
    return VertexSet.from_hex(graph, lines[2])


def random_subset(graph: ProductGraph, rng: np.random.Generator, density: float | None = None) -> VertexSet:
    p = rng.random() if density is None else density
    return VertexSet(graph, rng.random(graph.size) < p)

