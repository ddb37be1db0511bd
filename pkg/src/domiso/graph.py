"""Complete multipartite factors, their direct products, and dense product graphs.

Two graph shapes share one class:

* the *collapsed* graph: the product of complete graphs ``K_{t_1} x ... x K_{t_n}``
  whose vertex ``(a_1, ..., a_n)`` carries weight ``prod s_i(a_i)``, so its
  normalised weight is the pushforward of the uniform measure of the full graph;
* the *full* graph: every vertex of every factor is materialised, all weights 1.

Vertices are stored in mixed radix with coordinate 1 most significant, so index
``sum (a_i - 1) * prod_{k > i} r_k`` for 1-based coordinate values.  Public
coordinates and part labels are 1-based throughout the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import groupby

import numpy as np

from .errors import PreconditionError, SpecSyntaxError, UniverseTooLarge

DENSE_LIMIT = 1 << 24


@dataclass(frozen=True)
class PartiteFactor:
    """A complete multipartite graph given by its part sizes (stored descending)."""

    part_sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.part_sizes)
        if not sizes:
            raise PreconditionError("a factor needs at least one part")
        if any(s < 1 for s in sizes):
            raise PreconditionError("part sizes must be positive")
        object.__setattr__(self, "part_sizes", tuple(sorted(sizes, reverse=True)))

    @classmethod
    def balanced_factor(cls, u: int, t: int) -> PartiteFactor:
        return cls((u,) * t)

    @property
    def t(self) -> int:
        return len(self.part_sizes)

    @property
    def order(self) -> int:
        return sum(self.part_sizes)

    @property
    def balanced(self) -> bool:
        return len(set(self.part_sizes)) == 1

    @property
    def u(self) -> int:
        if not self.balanced:
            raise PreconditionError(f"{self} is not balanced")
        return self.part_sizes[0]

    @property
    def beta(self) -> Fraction:
        """Independence ratio: the largest part's share of the vertices."""
        return Fraction(self.part_sizes[0], self.order)

    def __str__(self) -> str:
        if self.balanced:
            if self.u == 1:
                return f"K_{self.t}"
            return f"K[{self.u},{self.t}]"
        return "K(" + ",".join(map(str, self.part_sizes)) + ")"

    def _key(self) -> tuple:
        return (self.t, self.part_sizes)


def _t_desc_key(f: PartiteFactor) -> tuple:
    return (-f.t, tuple(-s for s in f.part_sizes))


def _beta_asc_key(f: PartiteFactor) -> tuple:
    # Ties on beta are broken so that balanced specs get the same order as t-desc.
    return (f.beta, tuple(-s for s in f.part_sizes))


@dataclass(frozen=True, eq=False)
class ProductSpec:
    """An ordered list of factors; equality is multiset equality of the factors."""

    factors: tuple[PartiteFactor, ...]

    def __post_init__(self):
        factors = tuple(self.factors)
        if not factors:
            raise PreconditionError("a product needs at least one factor")
        object.__setattr__(self, "factors", factors)

    @classmethod
    def of(cls, *part_sizes: tuple[int, ...] | list[int]) -> ProductSpec:
        return cls(tuple(PartiteFactor(tuple(p)) for p in part_sizes))

    @classmethod
    def balanced_product(cls, pairs: list[tuple[int, int]]) -> ProductSpec:
        """Build from ``(u, t)`` pairs."""
        return cls(tuple(PartiteFactor.balanced_factor(u, t) for u, t in pairs))

    def _multiset(self) -> tuple:
        return tuple(sorted(f._key() for f in self.factors))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ProductSpec):
            return NotImplemented
        return self._multiset() == other._multiset()

    def __hash__(self) -> int:
        return hash(self._multiset())

    def __str__(self) -> str:
        return format_spec(self)

    def __repr__(self) -> str:
        return f"ProductSpec({format_spec(self)!r})"

    @property
    def n(self) -> int:
        return len(self.factors)

    @property
    def balanced(self) -> bool:
        return all(f.balanced for f in self.factors)

    @property
    def vertex_count(self) -> int:
        return math.prod(f.order for f in self.factors)

    @property
    def part_counts(self) -> tuple[int, ...]:
        return tuple(f.t for f in self.factors)

    @property
    def betas(self) -> tuple[Fraction, ...]:
        return tuple(f.beta for f in self.factors)

    def t_desc(self) -> ProductSpec:
        """Part counts non-increasing (the convention for balanced products)."""
        return ProductSpec(tuple(sorted(self.factors, key=_t_desc_key)))

    def beta_asc(self) -> ProductSpec:
        """Independence ratios non-decreasing; the last coordinate has the largest ratio."""
        return ProductSpec(tuple(sorted(self.factors, key=_beta_asc_key)))

    def canonical(self) -> ProductSpec:
        return self.t_desc() if self.balanced else self.beta_asc()

    def is_t_desc(self) -> bool:
        return list(self.factors) == sorted(self.factors, key=_t_desc_key)

    def is_beta_asc(self) -> bool:
        return list(self.factors) == sorted(self.factors, key=_beta_asc_key)

    def to_json(self) -> dict:
        canon = self.canonical()
        return {
            "factors": [list(f.part_sizes) for f in canon.factors],
            "balanced": self.balanced,
            "order": "t-desc" if self.balanced else "beta-asc",
        }


def format_spec(spec: ProductSpec) -> str:
    """Render in the spec grammar, grouping consecutive equal factors with ``^``."""
    chunks = []
    for factor, run in groupby(spec.factors):
        k = len(list(run))
        chunks.append(f"{factor}^{k}" if k > 1 else str(factor))
    return "x".join(chunks)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.raw = text.encode()
        self.pos = 0

    def fail(self, message: str, offset: int | None = None):
        raise SpecSyntaxError(message, self.pos if offset is None else offset)

    def peek(self, s: str) -> bool:
        return self.text.startswith(s, self.pos)

    def expect(self, s: str):
        if not self.peek(s):
            self.fail(f"expected {s!r}")
        self.pos += len(s)

    def uint(self) -> tuple[int, int]:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            self.fail("expected an unsigned integer")
        return int(self.text[start:self.pos]), start

    def atom(self) -> PartiteFactor:
        if self.peek("K_"):
            self.pos += 2
            t, at = self.uint()
            if t == 0:
                self.fail("zero part count", at)
            return PartiteFactor((1,) * t)
        if self.peek("K["):
            self.pos += 2
            u, at_u = self.uint()
            self.expect(",")
            t, at_t = self.uint()
            self.expect("]")
            if u == 0:
                self.fail("zero part size", at_u)
            if t == 0:
                self.fail("zero part count", at_t)
            return PartiteFactor((u,) * t)
        if self.peek("K("):
            self.pos += 2
            sizes = []
            while True:
                s, at = self.uint()
                if s == 0:
                    self.fail("zero part size", at)
                sizes.append(s)
                if self.peek(","):
                    self.pos += 1
                    continue
                break
            self.expect(")")
            if len(sizes) < 2:
                self.fail("explicit factor needs at least two part sizes")
            return PartiteFactor(tuple(sizes))
        self.fail("expected 'K_', 'K[' or 'K('")

    def factor(self) -> list[PartiteFactor]:
        f = self.atom()
        if self.peek("^"):
            self.pos += 1
            k, at = self.uint()
            if k == 0:
                self.fail("power of zero", at)
            return [f] * k
        return [f]

    def spec(self) -> ProductSpec:
        factors = self.factor()
        while self.peek("x"):
            self.pos += 1
            factors += self.factor()
        if self.pos != len(self.text):
            self.fail("unexpected trailing input")
        return ProductSpec(tuple(factors))


def parse_spec(text: str) -> ProductSpec:
    """Parse ``K_3``, ``K[u,t]``, ``K(s1,s2,...)`` factors joined by ``x`` with ``^n`` powers.

    The result keeps the written order; use :meth:`ProductSpec.canonical` for the
    canonical form.  Offsets in errors are byte offsets into ``text``.
    """
    stripped = text.strip()
    lead = len(text) - len(text.lstrip())
    try:
        return _Parser(stripped).spec()
    except SpecSyntaxError as exc:
        raise SpecSyntaxError(str(exc).rsplit(" (at byte", 1)[0],
                              len(text[: lead].encode()) + exc.offset) from None


@dataclass(frozen=True, eq=False)
class ProductGraph:
    """Dense product graph: a collapsed (weighted) or a full (uniform) materialisation.

    Two vertices are adjacent iff their parts differ in every coordinate.
    """

    spec: ProductSpec
    kind: str
    radices: tuple[int, ...]
    labels: tuple[tuple[int, ...], ...]
    weights: tuple[tuple[int, ...], ...]

    def _key(self) -> tuple:
        return (self.kind, tuple(f._key() for f in self.spec.factors))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ProductGraph):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        return f"ProductGraph({self.kind}, {format_spec(self.spec)!r})"

    @property
    def n(self) -> int:
        return len(self.radices)

    @property
    def size(self) -> int:
        return math.prod(self.radices)

    @property
    def part_counts(self) -> tuple[int, ...]:
        return self.spec.part_counts

    @property
    def betas(self) -> tuple[Fraction, ...]:
        return self.spec.betas

    @cached_property
    def total_weight(self) -> int:
        return math.prod(sum(w) for w in self.weights)

    @cached_property
    def strides(self) -> tuple[int, ...]:
        out, acc = [], 1
        for r in reversed(self.radices):
            out.append(acc)
            acc *= r
        return tuple(reversed(out))

    def encode(self, coords) -> int:
        """1-based coordinate tuple -> mixed-radix index."""
        if len(coords) != self.n:
            raise PreconditionError(f"expected {self.n} coordinates, got {len(coords)}")
        index = 0
        for c, r, s in zip(coords, self.radices, self.strides):
            if not 1 <= c <= r:
                raise PreconditionError(f"coordinate value {c} outside 1..{r}")
            index += (c - 1) * s
        return index

    def decode(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.size:
            raise PreconditionError(f"vertex index {index} outside universe")
        out = []
        for r in reversed(self.radices):
            index, c = divmod(index, r)
            out.append(c + 1)
        return tuple(reversed(out))

    def vertex_label(self, index: int) -> tuple[tuple[int, int], ...]:
        """Per coordinate ``(part, position within part)``, both 1-based."""
        out = []
        for i, c in enumerate(self.decode(index)):
            part = self.labels[i][c - 1]
            within = self.labels[i][: c - 1].count(part) + 1
            out.append((part + 1, within))
        return tuple(out)

    @cached_property
    def coords(self) -> np.ndarray:
        """``(size, n)`` array of 0-based coordinate values."""
        grids = np.indices(self.radices).reshape(self.n, -1).T
        grids.setflags(write=False)
        return grids

    @cached_property
    def parts(self) -> np.ndarray:
        """``(size, n)`` array of 0-based part labels."""
        out = np.empty((self.size, self.n), dtype=np.int64)
        for i, lab in enumerate(self.labels):
            out[:, i] = np.asarray(lab, dtype=np.int64)[self.coords[:, i]]
        out.setflags(write=False)
        return out

    @cached_property
    def weight_array(self) -> np.ndarray:
        dtype = np.int64 if self.total_weight < (1 << 62) else object
        out = np.ones(self.size, dtype=dtype)
        for i, w in enumerate(self.weights):
            out = out * np.asarray(w, dtype=dtype)[self.coords[:, i]]
        out.setflags(write=False)
        return out

    def weight(self, index: int) -> Fraction:
        return Fraction(int(self.weight_array[index]), self.total_weight)

    def measure(self, members: np.ndarray) -> Fraction:
        return Fraction(int(self.weight_array[members].sum()), self.total_weight)

    def adjacent(self, i: int, j: int) -> bool:
        return bool(np.all(self.parts[i] != self.parts[j]))

    @cached_property
    def collapse_index(self) -> np.ndarray:
        """Index of each vertex's part tuple in the collapsed graph of the same spec."""
        t = self.part_counts
        idx = np.zeros(self.size, dtype=np.int64)
        for i in range(self.n):
            idx = idx * t[i] + self.parts[:, i]
        idx.setflags(write=False)
        return idx

    def neighbor_masks(self, limit: int = 4096) -> tuple[int, ...]:
        """Open neighbourhoods as Python-int bitmasks (small graphs only)."""
        return self._neighbor_masks(limit)

    @cached_property
    def _nbr_cache(self) -> tuple[int, ...]:
        # differ[i][a]: vertices whose coordinate-i part is not a; a neighbourhood is an AND of n of them
        p = self.parts
        differ = []
        for i, f in enumerate(self.spec.factors):
            row = []
            for a in range(f.t):
                bits = np.packbits(p[:, i] != a, bitorder="little").tobytes()
                row.append(int.from_bytes(bits, "little"))
            differ.append(row)
        masks = []
        for v in range(self.size):
            m = -1
            for i, a in enumerate(p[v].tolist()):
                m &= differ[i][a]
            masks.append(m)
        return tuple(masks)

    def _neighbor_masks(self, limit: int) -> tuple[int, ...]:
        if self.size > limit:
            raise UniverseTooLarge(f"{self.size} vertices exceed the adjacency-mask limit {limit}")
        return self._nbr_cache

    def fiber(self, a: int, j: int) -> np.ndarray:
        """Membership array of the slice whose ``j``-th coordinate lies in part ``a``."""
        if not 1 <= j <= self.n:
            raise PreconditionError(f"coordinate {j} outside 1..{self.n}")
        if not 1 <= a <= self.part_counts[j - 1]:
            raise PreconditionError(f"part {a} outside 1..{self.part_counts[j - 1]}")
        return self.parts[:, j - 1] == a - 1


def _check_limit(size: int, limit: int):
    if size > limit:
        raise UniverseTooLarge(
            f"universe of {size} vertices is too large for dense representation (limit {limit})")


def build_collapsed(spec: ProductSpec, limit: int = DENSE_LIMIT) -> ProductGraph:
    """Product of complete graphs on part indices, weighted by part sizes.

    Coordinates follow ``spec.factors`` in the order given.
    """
    radices = spec.part_counts
    _check_limit(math.prod(radices), limit)
    return ProductGraph(
        spec=spec,
        kind="collapsed",
        radices=radices,
        labels=tuple(tuple(range(f.t)) for f in spec.factors),
        weights=tuple(f.part_sizes for f in spec.factors),
    )


def build_full(spec: ProductSpec, limit: int = DENSE_LIMIT) -> ProductGraph:
    """Every vertex materialised; within a factor, part 1's vertices come first."""
    radices = tuple(f.order for f in spec.factors)
    _check_limit(math.prod(radices), limit)
    labels = tuple(
        tuple(a for a, s in enumerate(f.part_sizes) for _ in range(s)) for f in spec.factors)
    return ProductGraph(
        spec=spec,
        kind="full",
        radices=radices,
        labels=labels,
        weights=tuple((1,) * r for r in radices),
    )


def alpha_formula(spec: ProductSpec) -> int:
    """Independence number ``|V| / t_min`` of a product of balanced factors."""
    if not spec.balanced:
        raise PreconditionError(
            "the closed form holds for balanced factors only; use max_independent_set")
    canon = spec.t_desc()
    t_n = canon.factors[-1].t
    count = canon.vertex_count
    assert count % t_n == 0
    return count // t_n
