"""Certified enclosures of transcendental quantities.

Values are computed with mpmath interval contexts (outward rounded) and then
frozen into :class:`IntervalScalar`, whose endpoints are exact binary rationals.
Each context has its own precision, so concurrent callers never share state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

from mpmath.ctx_iv import MPIntervalContext
from mpmath.libmp import finf, fnan, fninf, to_rational

from .errors import Indeterminate, PreconditionError

DEFAULT_BITS = 128
MAX_BITS = 1024


def precisions(start: int = DEFAULT_BITS, cap: int = MAX_BITS):
    """Escalation schedule: ``start``, ``2*start``, ... up to ``cap``."""
    bits = start
    while bits <= cap:
        yield bits
        bits *= 2


@lru_cache(maxsize=None)
def context(bits: int) -> MPIntervalContext:
    ctx = MPIntervalContext()
    ctx.prec = bits
    return ctx


def iv(ctx: MPIntervalContext, value) -> object:
    """Enclose an int, Fraction or (lo, hi) pair of rationals."""
    if isinstance(value, tuple):
        lo, hi = (Fraction(v) for v in value)
        return ctx.mpf([iv(ctx, lo).a, iv(ctx, hi).b])
    value = Fraction(value)
    if value.denominator == 1:
        return ctx.mpf(value.numerator)
    return ctx.mpf(value.numerator) / value.denominator


def _raw_to_fraction(raw) -> Fraction | None:
    if raw in (finf, fninf, fnan):
        return None
    p, q = to_rational(raw)
    return Fraction(int(p), int(q))


def endpoints(x) -> tuple[Fraction | None, Fraction | None]:
    """Exact endpoints of an mpmath interval; ``None`` for an infinite end."""
    lo, hi = x._mpi_
    return _raw_to_fraction(lo), _raw_to_fraction(hi)


@dataclass(frozen=True)
class IntervalScalar:
    """A closed interval ``[lo, hi]`` with exact rational endpoints."""

    lo: Fraction
    hi: Fraction
    bits: int = 0

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def exact(cls, value) -> IntervalScalar:
        v = Fraction(value)
        return cls(v, v, 0)

    @classmethod
    def from_mp(cls, x, bits: int) -> IntervalScalar:
        lo, hi = endpoints(x)
        if lo is None or hi is None:
            raise Indeterminate("interval enclosure is unbounded")
        return cls(lo, hi, bits)

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __float__(self) -> float:
        return float(self.mid)

    def contains(self, value) -> bool:
        return self.lo <= Fraction(value) <= self.hi

    def certainly_lt(self, value) -> bool:
        return self.hi < Fraction(value)

    def certainly_gt(self, value) -> bool:
        return self.lo > Fraction(value)

    def certainly_le(self, value) -> bool:
        return self.hi <= Fraction(value)

    def certainly_ge(self, value) -> bool:
        return self.lo >= Fraction(value)

    def __neg__(self) -> IntervalScalar:
        return IntervalScalar(-self.hi, -self.lo, self.bits)

    def __add__(self, other) -> IntervalScalar:
        o = _lift(other)
        return IntervalScalar(self.lo + o.lo, self.hi + o.hi, max(self.bits, o.bits))

    __radd__ = __add__

    def __sub__(self, other) -> IntervalScalar:
        return self + (-_lift(other))

    def __rsub__(self, other) -> IntervalScalar:
        return _lift(other) - self

    def __mul__(self, other) -> IntervalScalar:
        o = _lift(other)
        prods = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi]
        return IntervalScalar(min(prods), max(prods), max(self.bits, o.bits))

    __rmul__ = __mul__

    def to_json(self, digits: int = 40) -> dict:
        return {"lo": decimal_floor(self.lo, digits), "hi": decimal_ceil(self.hi, digits),
                "bits": self.bits}

    def __str__(self) -> str:
        if self.is_exact:
            return str(self.lo)
        return f"[{decimal_floor(self.lo, 12)}, {decimal_ceil(self.hi, 12)}]"


def _lift(x) -> IntervalScalar:
    return x if isinstance(x, IntervalScalar) else IntervalScalar.exact(x)


def _decimal(value: Fraction, digits: int, round_up: bool) -> str:
    scaled = value * 10**digits
    n = math.ceil(scaled) if round_up else math.floor(scaled)
    sign = "-" if n < 0 else ""
    n = abs(n)
    whole, frac = divmod(n, 10**digits)
    text = f"{sign}{whole}.{frac:0{digits}d}".rstrip("0")
    return text[:-1] if text.endswith(".") else text


def decimal_floor(value: Fraction, digits: int = 40) -> str:
    """A decimal string that is <= ``value``."""
    return _decimal(Fraction(value), digits, round_up=False)


def decimal_ceil(value: Fraction, digits: int = 40) -> str:
    """A decimal string that is >= ``value``."""
    return _decimal(Fraction(value), digits, round_up=True)


def evaluate(fn: Callable[[MPIntervalContext], object], bits: int = DEFAULT_BITS) -> IntervalScalar:
    """Run ``fn(ctx)`` in a fresh-precision context and freeze the result."""
    return IntervalScalar.from_mp(fn(context(bits)), bits)


def decide(fn: Callable[[int], IntervalScalar], test: Callable[[IntervalScalar], bool | None],
           start: int = DEFAULT_BITS, cap: int = MAX_BITS, what: str = "comparison"):
    """Evaluate at escalating precision until ``test`` returns True/False.

    ``test`` returns None while the interval straddles the decision point.
    Returns ``(verdict, interval)``; raises :class:`Indeterminate` at the cap.
    """
    last = None
    for bits in precisions(start, cap):
        last = fn(bits)
        verdict = test(last)
        if verdict is not None:
            return verdict, last
    raise Indeterminate(f"{what} undecided at {cap} bits (enclosure {last})")


def integer_log(x: Fraction, base: Fraction) -> int | None:
    """``k`` with ``base**k == x`` exactly, for ``0 < base < 1``; otherwise None."""
    if x <= 0 or not 0 < base < 1:
        return None
    if x == 1:
        return 0
    guess = math.log(x.numerator) - math.log(x.denominator)
    guess /= math.log(base.numerator) - math.log(base.denominator)
    k0 = round(guess)
    for k in (k0 - 1, k0, k0 + 1):
        if k >= 0 and base**k == x:
            return k
    return None


def log_ratio_power(x: Fraction, base: Fraction, target: Fraction,
                    bits: int = DEFAULT_BITS) -> IntervalScalar:
    """Enclose ``x ** (log target / log base)`` for ``0 < base, target < 1`` and ``x >= 0``.

    Exact whenever ``x`` is an integral power ``base**k``: the value is then ``target**k``.
    """
    x, base, target = Fraction(x), Fraction(base), Fraction(target)
    if x < 0:
        raise PreconditionError("negative base in a real power")
    if x == 0:
        return IntervalScalar.exact(0)
    k = integer_log(x, base)
    if k is not None:
        return IntervalScalar.exact(target**k)

    def fn(ctx):
        e = ctx.log(iv(ctx, target)) / ctx.log(iv(ctx, base))
        return ctx.exp(ctx.log(iv(ctx, x)) * e)

    return evaluate(fn, bits)


def inv_eta_power(x: Fraction, t: int, bits: int = DEFAULT_BITS) -> IntervalScalar:
    """``x ** (1/eta(t))``; exact when ``x`` is a power of ``1/t``."""
    if t == 2:
        return IntervalScalar.exact(x)
    return log_ratio_power(x, Fraction(1, t), Fraction(t - 1, t), bits)


def eta_power(x: Fraction, t: int, bits: int = DEFAULT_BITS) -> IntervalScalar:
    """``x ** eta(t)``; exact when ``x`` is a power of ``(t-1)/t``."""
    if t == 2:
        return IntervalScalar.exact(x)
    return log_ratio_power(x, Fraction(t - 1, t), Fraction(1, t), bits)


def mp_eta(ctx, t):
    """``eta(t)`` inside an interval context (``t`` an int or an interval)."""
    t = iv(ctx, t) if isinstance(t, (int, Fraction)) else t
    return ctx.log(t) / ctx.log(t / (t - 1))


def mp_inv_eta(ctx, t):
    t = iv(ctx, t) if isinstance(t, (int, Fraction)) else t
    return ctx.log(t / (t - 1)) / ctx.log(t)
