"""Registered inequalities and the suites they belong to.

Every id asserts ``margin > 0`` on its region.  Continuous variables ranging
over ``x >= t`` are compactified by ``y = 1/x`` in ``(0, 1/t]``.  Throughout,
``p = 1/eta(t) = log(t/(t-1)) / log(t)``, and the identity ``t**p = t/(t-1)``
turns several transcendental endpoint values into rationals.

Each entry records the reduction it relies on.  Integer ranges are finite
prefixes; where an unbounded tail is needed, a separate id covers it with a
rational-function or elementary bound, and otherwise the prefix extends at
least twice past the point where the argument starts.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import sympy
from sympy import Integer, Rational, log

from ..errors import PreconditionError
from ..intervals import DEFAULT_BITS, IntervalScalar, MAX_BITS, context, endpoints
from .engine import (InequalityCert, Region, certify_box, certify_rational_tail, compile_iv)

y, s, b, nu, u, e = sympy.symbols("y s b nu u e", nonnegative=True)
t = sympy.Symbol("t", positive=True)

SUITES = ("cor1-eq1", "lemma4-eqs6-8", "lemma5-eq17", "lemma7-eqs24-27",
          "thm6-derivatives-eqs28-31", "thm7-numerics-eqs33-41")


def inv_eta(tv: int) -> sympy.Expr:
    return log(Rational(tv, tv - 1)) / log(Integer(tv))


def eta_expr(tv: int) -> sympy.Expr:
    return log(Integer(tv)) / log(Rational(tv, tv - 1))


def omega_expr(tv: int) -> sympy.Expr:
    if tv == 3:
        return Rational(37, 81) - Rational(1, 2) * Rational(5, 81) ** inv_eta(3)
    if tv == 4:
        return Rational(85, 256) - Rational(1, 3) * Rational(7, 256) ** inv_eta(4)
    return Rational(4 * tv - 3, tv**3)


def _omega_bounds(tv: int) -> tuple[Fraction, Fraction]:
    lo, hi = endpoints(compile_iv(omega_expr(tv), (), context(DEFAULT_BITS))(()))
    return lo, hi


@dataclass(frozen=True)
class Inequality:
    id: str
    suite: str | None
    statement: str
    reduction: str
    region: Region
    margin: Callable[..., sympy.Expr] | None = None
    tail: sympy.Expr | None = None
    values: Callable[[], dict] | None = None
    tags: tuple[str, ...] = field(default_factory=tuple)


REGISTRY: dict[str, Inequality] = {}


def register(ineq: Inequality) -> Inequality:
    if ineq.id in REGISTRY:
        raise ValueError(f"duplicate inequality id {ineq.id}")
    REGISTRY[ineq.id] = ineq
    return ineq


def _ybox(tv: int):
    return [(y, Fraction(0), Fraction(1, tv))]


_YTEXT = (("y", "0", "1/t"),)


# --- power lower bound for the profile ---------------------------------------

def _c(bv):
    return log(1 - bv) / log(bv)


B_LO, B_HI = Fraction(1, 4096), Fraction(2047, 4096)

register(Inequality(
    "cor1-exponent-positive", "cor1-eq1",
    "c(beta) = log(1-beta)/log(beta) > 0",
    "both logarithms are negative on (0, 1/2)",
    Region(box=lambda _: [(b, B_LO, B_HI)], box_text=(("beta", "1/4096", "2047/4096"),)),
    margin=lambda: _c(b),
))
register(Inequality(
    "cor1-exponent-below-one", "cor1-eq1",
    "1 - c(beta) > 0",
    "log(1-beta) > log(beta) for beta < 1/2; the bound is an identity at beta = 1/2",
    Region(box=lambda _: [(b, B_LO, B_HI)], box_text=(("beta", "1/4096", "2047/4096"),),
           max_depth=48),
    margin=lambda: 1 - _c(b),
))
_X = b + s * (1 - b)
_X1 = (1 - b) * (1 - s)  # 1 - x, written without cancellation
register(Inequality(
    "cor1-concavity", "cor1-eq1",
    "-(d/dx)^2 [x^c + beta((1-x)/(1-beta))^c] > 0 for beta <= x < 1",
    "with 0 < c < 1 the left side is concave in x, and it equals 1 at x = beta and at x = 1, "
    "so it is at least 1 between them",
    Region(box=lambda _: [(b, B_LO, B_HI), (s, Fraction(0), Fraction(1023, 1024))],
           box_text=(("beta", "1/4096", "2047/4096"), ("s", "0", "1023/1024")),
           constraint="x = beta + s(1-beta)", max_depth=60, max_evals=200000),
    margin=lambda: _c(b) * (1 - _c(b)) * (_X ** (_c(b) - 2)
                                          + b * (1 - b) ** (-_c(b)) * _X1 ** (_c(b) - 2)),
))


def _power_bound_points() -> tuple[dict, ...]:
    betas = [Fraction(1, k) for k in range(3, 41)] + [Fraction(3, 10), Fraction(2, 5),
                                                      Fraction(5, 11), Fraction(7, 15)]
    pts = []
    for bv in betas:
        for k in range(1, 16):
            pts.append({"b": bv, "s": Fraction(k, 16)})
    return tuple(pts)


register(Inequality(
    "cor1-interior-points", "cor1-eq1",
    "x^c + beta((1-x)/(1-beta))^c - 1 > 0 at interior grid points",
    "spot values; the continuum statement follows from the concavity id",
    Region(points=_power_bound_points(), constraint="x = beta + (1-beta)k/16, k = 1..15"),
    margin=lambda: _X ** _c(b) + b * (1 - s) ** _c(b) - 1,
))


# --- dichotomy for sorted independent sets ----------------------------------

def _exponent_in_unit_interval(tv):
    p = inv_eta(tv)
    return p * (1 - p)


register(Inequality(
    "lemma4-exponent-unit-interval", "lemma4-eqs6-8",
    "(1/eta(t))(1 - 1/eta(t)) > 0, i.e. 0 < 1/eta(t) < 1",
    "gives concavity of delta^(1/eta) and so convexity of the left side in delta; "
    "the tail is the rational id lemma4-exponent-tail",
    Region(ints=(("t", 3, 200),)),
    margin=_exponent_in_unit_interval,
))
register(Inequality(
    "lemma4-exponent-tail", "lemma4-eqs6-8",
    "t - t/(t-1) > 0 for t >= 3, i.e. log(t/(t-1)) < log t",
    "rational function with one-signed coefficients after t = 3 + s",
    Region(tail_from=3),
    tail=t - t / (t - 1),
))


def _low_endpoint_lhs(tv):
    p = inv_eta(tv)
    return y + y**4 - y**5 - y ** (1 + 5 * p) / (1 - y)


def _high_endpoint_lhs(tv):
    p = inv_eta(tv)
    return y + y**2 * (2 - y) * (1 - y) - y ** (1 + 3 * p) * (2 - y) ** p / (1 - y)


register(Inequality(
    "lemma4-low-endpoint-small-t", "lemma4-eqs6-8",
    "omega(t) - [1/x + (x-1)/x^5 - (1/(x-1)) x^(-5/eta(t))] > 0 for x >= t, t in {3, 4}",
    "direct check over y = 1/x in (0, 1/t]",
    Region(ints=(("t", 3, 4),), box=lambda iv_: _ybox(iv_["t"]), box_text=_YTEXT),
    margin=lambda t: omega_expr(t) - _low_endpoint_lhs(t),
))
register(Inequality(
    "lemma4-high-endpoint-small-t", "lemma4-eqs6-8",
    "d/dy [y + y^2(2-y)(1-y) - y^(1+3/eta)(2-y)^(1/eta)/(1-y)] > 0 on (0, 1/t], t in {3, 4}",
    "the left side at x = t equals omega(t) by definition, so monotonicity gives the inequality "
    "for all x >= t (with equality at x = t)",
    Region(ints=(("t", 3, 4),), box=lambda iv_: _ybox(iv_["t"]), box_text=_YTEXT),
    margin=lambda t: sympy.diff(_high_endpoint_lhs(t), y),
))
register(Inequality(
    "lemma4-low-endpoint", "lemma4-eqs6-8",
    "(4t-3)/t^3 - [1/x + (x-1)/x^5 - (1/(x-1)) x^(-5/eta(t))] > 0 for x >= t",
    "direct check over y = 1/x in (0, 1/t]",
    Region(ints=(("t", 5, 40),), box=lambda iv_: _ybox(iv_["t"]), box_text=_YTEXT),
    margin=lambda t: omega_expr(t) - _low_endpoint_lhs(t),
))
register(Inequality(
    "lemma4-high-endpoint", "lemma4-eqs6-8",
    "(4t-3)/t^3 - [1/x + (2x-1)(x-1)/x^4 - (1/(x-1))((2x-1)/x^4)^(1/eta(t))] > 0 for x >= t",
    "direct check over y = 1/x in (0, 1/t]",
    Region(ints=(("t", 5, 40),), box=lambda iv_: _ybox(iv_["t"]), box_text=_YTEXT),
    margin=lambda t: omega_expr(t) - _high_endpoint_lhs(t),
))
register(Inequality(
    "lemma4-low-endpoint-decreasing", "lemma4-eqs6-8",
    "the low-endpoint left side is decreasing in x >= t",
    "derivative in y = 1/x is positive, so the value at x = t dominates",
    Region(ints=(("t", 5, 40),), box=lambda iv_: _ybox(iv_["t"]), box_text=_YTEXT),
    margin=lambda t: sympy.diff(_low_endpoint_lhs(t), y),
))
register(Inequality(
    "lemma4-high-endpoint-decreasing", "lemma4-eqs6-8",
    "the high-endpoint left side is decreasing in x >= t",
    "derivative in y = 1/x is positive, so the value at x = t dominates",
    Region(ints=(("t", 5, 40),), box=lambda iv_: _ybox(iv_["t"]), box_text=_YTEXT),
    margin=lambda t: sympy.diff(_high_endpoint_lhs(t), y),
))
register(Inequality(
    "lemma4-low-endpoint-at-t", "lemma4-eqs6-8",
    "(4t-3)/t^3 - 1/t - (t-1)/t^5 + (t-1)^4/t^5 > 0 for t >= 5",
    "x = t uses t^(-5/eta(t)) = ((t-1)/t)^5; rational tail",
    Region(tail_from=5),
    tail=(4 * t - 3) / t**3 - 1 / t - (t - 1) / t**5 + (t - 1) ** 4 / t**5,
))
register(Inequality(
    "lemma4-high-endpoint-at-t", "lemma4-eqs6-8",
    "(4t-3)/t^3 - 1/t - (2t-1)(t-1)/t^4 + (t-1)^2/t^3 > 0 for t >= 5",
    "x = t uses ((2t-1)/t^4)^(1/eta) = (2-1/t)^(1/eta) ((t-1)/t)^3 and drops the factor "
    "(2-1/t)^(1/eta) > 1; rational tail",
    Region(tail_from=5),
    tail=(4 * t - 3) / t**3 - 1 / t - (2 * t - 1) * (t - 1) / t**4 + (t - 1) ** 2 / t**3,
))


# --- compressed sets: the quantity Q ----------------------------------------

def _Q(tv):
    p = inv_eta(tv)
    return (Rational(2 * tv - 1, tv**3) / y - y**3
            + Rational(tv, tv - 1) * y ** (3 * p) / (1 - y) - 1)


register(Inequality(
    "lemma5-fixed-tn", "lemma5-eq17",
    "x(2t-1)/t^3 - 1/x^3 + x t/((x-1)(t-1)) x^(-3/eta(t)) > 1 for real x >= t, t in 3..21",
    "direct check over y = 1/x in (0, 1/t], covering every integer t_j >= t_n at once",
    Region(ints=(("t", 3, 21),), box=lambda iv_: _ybox(iv_["t"]), box_text=_YTEXT),
    margin=_Q,
))
register(Inequality(
    "lemma5-derivative-at-t", "lemma5-eq17",
    "((t-1)/t^2)(1/t - 3/eta(t)) > 0 for t in 22..44",
    "lower bound for dQ/dx at x = t; the tail t >= 25 is lemma5-eta-growth",
    Region(ints=(("t", 22, 44),)),
    margin=lambda t: Rational(t - 1, t**2) * (Rational(1, t) - 3 * inv_eta(t)),
))
register(Inequality(
    "lemma5-eta-growth", "lemma5-eq17",
    "log 25 - 75/24 > 0",
    "eta(t) >= (t-1) log t since log(t/(t-1)) <= 1/(t-1); for t >= 25, log t >= log 25 > 75/24 "
    ">= 3t/(t-1), so eta(t) > 3t and 1/t - 3/eta(t) > 0",
    Region(),
    margin=lambda: log(Integer(25)) - Rational(75, 24),
))


def _h_normalised(tv):
    p = inv_eta(tv)
    q = 3 * p + 1
    g = (y + 3 * p * (1 - y)) / (1 - y) ** 2
    return q * g + y * sympy.diff(g, y)


register(Inequality(
    "lemma5-derivative-bound-increasing", "lemma5-eq17",
    "(t/(t-1)) x^(-3/eta)(1 + (3/eta)(x-1))/(x-1)^2 is decreasing in x >= t, t in 22..44",
    "in y = 1/x the expression is K y^q g(y) with q = 1 + 3/eta and "
    "g = (y + 3/eta (1-y))/(1-y)^2; its y-derivative divided by K y^(q-1) is q g + y g'",
    Region(ints=(("t", 22, 44),), box=lambda iv_: _ybox(iv_["t"]), box_text=_YTEXT),
    margin=_h_normalised,
))
register(Inequality(
    "lemma5-diagonal", "lemma5-eq17",
    "(2t-1)/t^2 - 1/t^3 + (t-1)/t - 1 > 0 for t >= 22",
    "Q at x = t, using t^(-3/eta) = ((t-1)/t)^3; numerator t^2 - t - 1; rational tail",
    Region(tail_from=22),
    tail=(2 * t - 1) / t**2 - 1 / t**3 + (t - 1) / t - 1,
))


# --- the technical lemma over (x, nu, m) ------------------------------------

def _region_lhs(tv, nv):
    p = inv_eta(tv)
    return y + y**4 + nv - nv**p * y / (1 - y)


def _nu_lo():
    return y**3 * (2 - y)


def _low_nu(tv):
    _, whi = _omega_bounds(tv)
    top = Rational(whi.numerator, whi.denominator) / 2
    nv = _nu_lo() * (1 - s) + s * top
    return omega_expr(tv) - _region_lhs(tv, nv)


def _high_nu(tv):
    wlo, _ = _omega_bounds(tv)
    bot = Rational(wlo.numerator, wlo.denominator) / 2
    nv = bot + s * (Rational(1, 2) - bot)
    return 2 * nv - _region_lhs(tv, nv)


_SBOX = lambda iv_: [(y, Fraction(0), Fraction(1, iv_["t"])), (s, Fraction(0), Fraction(1))]  # noqa: E731

register(Inequality(
    "lemma7-region-low-nu", "lemma7-eqs24-27",
    "omega(t) - [1/x + 1/x^4 + nu - nu^(1/eta)/(x-1)] > 0 for (2x-1)/x^4 <= nu <= omega(t)/2",
    "with m >= omega(t) >= 2 nu, m is at least omega(t); direct two-dimensional check",
    Region(ints=(("t", 3, 40),), box=_SBOX,
           box_text=(("y", "0", "1/t"), ("s", "0", "1")),
           constraint="x = 1/y, nu = (1-s) y^3(2-y) + s omega_hi/2",
           max_depth=60, max_evals=200000),
    margin=_low_nu,
))
register(Inequality(
    "lemma7-region-high-nu", "lemma7-eqs24-27",
    "2 nu - [1/x + 1/x^4 + nu - nu^(1/eta)/(x-1)] > 0 for omega(t)/2 <= nu <= 1/2",
    "with m >= 2 nu >= omega(t), m is at least 2 nu; beyond nu = 1/2 see lemma7-high-nu-increasing",
    Region(ints=(("t", 3, 40),), box=_SBOX,
           box_text=(("y", "0", "1/t"), ("s", "0", "1")),
           constraint="x = 1/y, nu = omega_lo/2 + s(1/2 - omega_lo/2)",
           max_depth=60, max_evals=200000),
    margin=_high_nu,
))
register(Inequality(
    "lemma7-high-nu-increasing", "lemma7-eqs24-27",
    "d/dnu of the high-nu margin, 1 + (1/eta) nu^(1/eta - 1) y/(1-y), is positive",
    "every term is nonnegative; checked on nu in [1/4, 1] so larger nu reduce to smaller ones",
    Region(ints=(("t", 3, 40),),
           box=lambda iv_: [(y, Fraction(0), Fraction(1, iv_["t"])), (nu, Fraction(1, 4), Fraction(1))],
           box_text=(("y", "0", "1/t"), ("nu", "1/4", "1"))),
    margin=lambda t: 1 + inv_eta(t) * nu ** (inv_eta(t) - 1) * y / (1 - y),
))


def _case_large(tv):
    p = inv_eta(tv)
    c = Rational(2 * tv - 1, tv**3)
    return -(Rational(1, tv) * (1 - c**p) + Rational(1, tv**4) - c)


register(Inequality(
    "lemma7-case-large-nu", "lemma7-eqs24-27",
    "-(1/t (1 - ((2t-1)/t^3)^(1/eta)) + 1/t^4 - (2t-1)/t^3) > 0",
    "for nu >= (2t-1)/t^3 the claim reduces to this at x = t, the left side being decreasing in x",
    Region(ints=(("t", 3, 80),)),
    margin=_case_large,
))


def _region_margin_at(tv, nv):
    return omega_expr(tv) - _region_lhs(tv, nv)


register(Inequality(
    "lemma7-eq25-upper-endpoint-small-t", "lemma7-eqs24-27",
    "omega(t) - L(x, (2t-1)/t^3) > 0 for x >= t, t in {3, 4}",
    "endpoint of the convexity reduction in nu; direct over y",
    Region(ints=(("t", 3, 4),), box=lambda iv_: _ybox(iv_["t"]), box_text=_YTEXT),
    margin=lambda t: _region_margin_at(t, Rational(2 * t - 1, t**3)),
))
register(Inequality(
    "lemma7-eq25-lower-endpoint-small-t", "lemma7-eqs24-27",
    "omega(t) - L(x, (2x-1)/x^4) > 0 for x >= t, t in {3, 4}",
    "endpoint of the convexity reduction in nu; direct over y",
    Region(ints=(("t", 3, 4),), box=lambda iv_: _ybox(iv_["t"]), box_text=_YTEXT),
    margin=lambda t: _region_margin_at(t, _nu_lo()),
))


def _chain_margin_at_t(tv):
    p = inv_eta(tv)
    c = Rational(2 * tv - 1, tv**3)
    return omega_expr(tv) - (Rational(1, tv) + Rational(1, tv**4) + c - c**p / tv)


register(Inequality(
    "lemma7-eq26-at-t", "lemma7-eqs24-27",
    "(4t-3)/t^3 - [1/t + 1/t^4 + (2t-1)/t^3 - (1/t)((2t-1)/t^3)^(1/eta)] > 0",
    "the left side (1 - nu^(1/eta))/x + 1/x^4 + nu is decreasing in x, so x = t suffices",
    Region(ints=(("t", 5, 80),)),
    margin=_chain_margin_at_t,
))
register(Inequality(
    "lemma7-eq27-direct", "lemma7-eqs24-27",
    "(4t-3)/t^3 - [1/x + 2/x^3 - (1/x) x^(-3/eta)] > 0 for x >= t",
    "direct check over y = 1/x in (0, 1/t]",
    Region(ints=(("t", 5, 40),), box=lambda iv_: _ybox(iv_["t"]), box_text=_YTEXT),
    margin=lambda t: omega_expr(t) - (y + 2 * y**3 - y ** (1 + 3 * inv_eta(t))),
))
register(Inequality(
    "lemma7-eq27-at-t", "lemma7-eqs24-27",
    "(4t-3)/t^3 - 1/t - 2/t^3 + (t-1)^3/t^4 > 0 for t >= 5",
    "x = t uses t^(-3/eta) = ((t-1)/t)^3; rational tail",
    Region(tail_from=5),
    tail=(4 * t - 3) / t**3 - 1 / t - 2 / t**3 + (t - 1) ** 3 / t**4,
))
register(Inequality(
    "lemma7-eq27-decreasing", "lemma7-eqs24-27",
    "1 - (1 + 3/eta) x^(-3/eta) > 0 for x >= t",
    "makes the derivative of the left side negative; direct over y for t in 5..80, "
    "tail by lemma7-eq27-exp-bound",
    Region(ints=(("t", 5, 80),), box=lambda iv_: _ybox(iv_["t"]), box_text=_YTEXT),
    margin=lambda t: 1 - (1 + 3 * inv_eta(t)) * y ** (3 * inv_eta(t)),
))
register(Inequality(
    "lemma7-eq27-exp-bound", "lemma7-eqs24-27",
    "log 5 - 1 > 0",
    "(1 + 3/eta)^eta < e^3 because log(1+z) < z, and e^3 < 5^3 <= x^3 for x >= 5",
    Region(),
    margin=lambda: log(Integer(5)) - 1,
))


# --- derivative certificates in the stability proof -------------------------

register(Inequality(
    "thm6-f-derivative", "thm6-derivatives-eqs28-31",
    "t^(3 - 5/eta(t)) - eta(t) > 0",
    "t^(3-5/eta) = (t-1)^5/t^2; makes f increasing on (0, 1/t_j^4), so f > f(0) = 0",
    Region(ints=(("t", 3, 200),)),
    margin=lambda t: Rational((t - 1) ** 5, t**2) - eta_expr(t),
))
register(Inequality(
    "thm6-f-derivative-tail", "thm6-derivatives-eqs28-31",
    "(t-1)^4 - t^3 > 0 for t >= 4",
    "eta(t) <= t log t <= t(t-1), so (t-1)^5/t^2 > t(t-1) suffices; rational tail",
    Region(tail_from=4),
    tail=(t - 1) ** 4 - t**3,
))
register(Inequality(
    "thm6-g-ratio-increasing", "thm6-derivatives-eqs28-31",
    "(2 + 1/eta)/(x-1) - (2 - 4/eta)/x > 0 for x >= t",
    "log-derivative of (x-1)^(2+1/eta)/x^(2-4/eta); divided by y = 1/x",
    Region(ints=(("t", 3, 80),), box=lambda iv_: _ybox(iv_["t"]), box_text=_YTEXT),
    margin=lambda t: (2 + inv_eta(t)) / (1 - y) - (2 - 4 * inv_eta(t)),
))
register(Inequality(
    "thm6-g-derivative-base", "thm6-derivatives-eqs28-31",
    "(t-1)^(2+1/eta) t^(4/eta - 2) - (1 + 1/eta) > 0",
    "value of the bracket at x = t; with the increasing id this makes g increasing on [t_n, t_j]",
    Region(ints=(("t", 3, 200),)),
    margin=lambda t: (Integer(t - 1) ** (2 + inv_eta(t)) * Integer(t) ** (4 * inv_eta(t) - 2)
                      - 1 - inv_eta(t)),
))
register(Inequality(
    "thm6-g-eta-gap", "thm6-derivatives-eqs28-31",
    "1/(t-1) - 1/eta(t) > 0",
    "the bracket exceeds t/(t-1) - (1 + 1/eta); tail by thm6-g-eta-gap-tail",
    Region(ints=(("t", 3, 200),)),
    margin=lambda t: Rational(1, t - 1) - inv_eta(t),
))
register(Inequality(
    "thm6-g-eta-gap-tail", "thm6-derivatives-eqs28-31",
    "log 3 - 1 > 0",
    "eta(t) >= (t-1) log t > t - 1 for t >= 3",
    Region(),
    margin=lambda: log(Integer(3)) - 1,
))


def _final_bound_log(tv):
    p = inv_eta(tv)
    r = -tv * u + Rational(tv, tv - 1) * Integer(tv - 1) ** (-p)
    return log(r) + p * log(Integer(4))


register(Inequality(
    "thm6-final-bound", "thm6-derivatives-eqs28-31",
    "log(r) + (1/eta) log 4 > 0 with r = -t u + (t/(t-1))(t-1)^(-1/eta), 0 <= u <= (t-1)^-3",
    "with u = delta^(1 - 1/eta) the fiber lower bound reads eps >= delta^(1/eta) r, and "
    "4 r^eta > 1 gives delta < 4 eps^eta; delta <= 1/t^3 maps to u <= 1/(t-1)^3",
    Region(ints=(("t", 3, 40),),
           box=lambda iv_: [(u, Fraction(0), Fraction(1, (iv_["t"] - 1) ** 3))],
           box_text=(("u", "0", "1/(t-1)^3"),)),
    margin=_final_bound_log,
))


# --- density and chain numerics ---------------------------------------------

def threshold_expr() -> sympy.Expr:
    return 1 - 3 * omega_expr(3)


def _chain(tv):
    p = inv_eta(tv)
    return (Rational(16, tv**2) + 4 * tv**2 * Rational(16, tv**3) ** eta_expr(tv)) ** (1 - p)


def _chain4():
    p = inv_eta(4)
    return (Rational(16, 256) + 4 * Rational(16, 64) ** eta_expr(4)) ** (1 - p)


K37 = Rational(2**7, 3**6)


def _chain_value_t3(ev):
    p = inv_eta(3)
    return (ev / 3 + 4 * ev ** eta_expr(3)) ** (1 - p)


def _values_of(**exprs):
    def make():
        ctx = context(DEFAULT_BITS)
        return {k: IntervalScalar.from_mp(compile_iv(v, (), ctx)(()), DEFAULT_BITS)
                for k, v in exprs.items()}
    return make


register(Inequality(
    "thm7-density-t4", "thm7-numerics-eqs33-41",
    "1/4 - (2/4)^4 - omega(4) > 0",
    "the density bound for t_n = 4",
    Region(),
    margin=lambda: Rational(1, 4) - Rational(1, 16) - omega_expr(4),
    values=_values_of(omega4=omega_expr(4)),
))
register(Inequality(
    "thm7-density-tail", "thm7-numerics-eqs33-41",
    "1/t - 16/t^4 - (4t-3)/t^3 > 0 for t >= 5",
    "numerator t^3 - 4t^2 + 3t - 16; rational tail",
    Region(tail_from=5),
    tail=1 / t - 16 / t**4 - (4 * t - 3) / t**3,
))
register(Inequality(
    "thm7-eps0-n-ge-8", "thm7-numerics-eqs33-41",
    "(1 - 3 omega(3)) - 2^8/3^7 > 0",
    "2^n/3^(n-1) is decreasing in n (ratio 2/3), so n = 8 dominates every n >= 8",
    Region(),
    margin=lambda: threshold_expr() - Rational(2**8, 3**7),
    values=_values_of(threshold=threshold_expr(), omega3=omega_expr(3)),
))
register(Inequality(
    "thm7-chain-t5", "thm7-numerics-eqs33-41",
    "(1 - 16/125) - (16/25 + 100 (16/125)^eta(5))^(1 - 1/eta(5)) > 0",
    "for t_n >= 5 the chain is decreasing in t_n (thm7-chain-decreasing) and eps0 <= 16/125",
    Region(),
    margin=lambda: Rational(109, 125) - _chain(5),
    values=_values_of(chain_t5=_chain(5)),
))
register(Inequality(
    "thm7-chain-decreasing", "thm7-numerics-eqs33-41",
    "F(t) - F(t+1) > 0 with F(t) = (16/t^2 + 4t^2 (16/t^3)^eta(t))^(1 - 1/eta(t))",
    "monotonicity of the chain bound over t in 5..200",
    Region(ints=(("t", 5, 200),)),
    margin=lambda t: _chain(t) - _chain(t + 1),
))
register(Inequality(
    "thm7-chain-t4", "thm7-numerics-eqs33-41",
    "(1 - 1/4)/4 - (16/4^4 + 4 (16/4^3)^eta(4))^(1 - 1/eta(4)) > 0",
    "eps0 <= 2^4/4^3 = 1/4 for t_n = 4",
    Region(),
    margin=lambda: Rational(3, 16) - _chain4(),
    values=_values_of(chain_t4=_chain4()),
))
register(Inequality(
    "thm7-forced-t3", "thm7-numerics-eqs33-41",
    "omega(3) - 1/4 > 0",
    "1/omega(3) < 4 forces t_j = 3",
    Region(),
    margin=lambda: omega_expr(3) - Rational(1, 4),
))


def _eps_top() -> Fraction:
    _, hi = endpoints(compile_iv(threshold_expr(), (), context(DEFAULT_BITS))(()))
    return hi


register(Inequality(
    "thm7-final-t3", "thm7-numerics-eqs33-41",
    "1/3 - (e/3 + 4 e^eta(3))^(1 - 1/eta(3)) > 0 for 0 <= e <= 1 - 3 omega(3)",
    "eps0 below the threshold contradicts the final inequality; direct over e",
    Region(box=lambda _: [(e, Fraction(0), _eps_top())], box_text=(("e", "0", "1-3omega(3)"),)),
    margin=lambda: Rational(1, 3) - _chain_value_t3(e),
))
register(Inequality(
    "thm7-final-k3-7", "thm7-numerics-eqs33-41",
    "1/3 - (e/3 + 4 e^eta(3))^(1 - 1/eta(3)) > 0 at e = 2^7/3^6",
    "the special product K_3^7",
    Region(),
    margin=lambda: Rational(1, 3) - _chain_value_t3(K37),
    values=_values_of(k3_7=_chain_value_t3(K37)),
))

register(Inequality(
    "thm7-eps0-k3-7", None,
    "(1 - 3 omega(3)) - 2^7/3^6 > 0",
    "fails: this is why K_3^7 needs separate treatment",
    Region(),
    margin=lambda: threshold_expr() - K37,
))


# --- running -----------------------------------------------------------------

def _merge_outcome(cert: InequalityCert, out):
    cert.evals += out.evals
    if out.margin_lo is not None:
        cert.margin_lo = out.margin_lo if cert.margin_lo is None else min(cert.margin_lo, out.margin_lo)
    if out.margin_hi is not None:
        cert.margin_hi = out.margin_hi if cert.margin_hi is None else min(cert.margin_hi, out.margin_hi)


def verify_inequality(id: str, region: Region | None = None, bits: int = DEFAULT_BITS) -> InequalityCert:
    """Certify a registered inequality on its region (or an explicit override)."""
    if id not in REGISTRY:
        raise PreconditionError(f"unknown inequality id {id!r}")
    if not DEFAULT_BITS <= bits <= MAX_BITS:
        raise PreconditionError(f"precision must lie in [{DEFAULT_BITS}, {MAX_BITS}] bits")
    ineq = REGISTRY[id]
    reg = region or ineq.region
    cert = InequalityCert(id, reg.to_json(), "verified", None, None, bits, reduction=ineq.reduction)
    if ineq.values is not None:
        cert.values = ineq.values()
    if ineq.tail is not None:
        out = certify_rational_tail(ineq.tail, t, reg.tail_from)
        cert.verdict = out.verdict
        cert.margin_lo = cert.margin_hi = out.value_at_start
        if out.verdict != "verified":
            cert.counterexample = {"t": str(reg.tail_from)}
        return cert
    for ints in reg.int_points():
        expr = sympy.sympify(ineq.margin(*ints.values()))
        if reg.box is not None:
            box = reg.box(ints)
            syms = tuple(sym for sym, _, _ in box)
            out = certify_box(expr, syms, [(lo, hi) for _, lo, hi in box], bits,
                              reg.max_depth, reg.max_evals)
        elif reg.points:
            syms = tuple(sorted(expr.free_symbols, key=str))
            out = None
            for pt in reg.points:
                o = certify_box(expr, syms, [(pt[str(sym)], pt[str(sym)]) for sym in syms], bits,
                                max_depth=0)
                out = o if out is None else _combine(out, o)
                if o.verdict != "verified":
                    out = o
                    break
        else:
            out = certify_box(expr, (), [], bits, max_depth=0)
        _merge_outcome(cert, out)
        if out.verdict != "verified":
            cert.verdict = out.verdict
            cert.counterexample = {**{k: str(v) for k, v in ints.items()}, **(out.counterexample or {})}
            if not cert.counterexample:
                cert.counterexample = {"closed_form": ineq.statement}
            if out.verdict == "failed":
                cert.margin_lo, cert.margin_hi = out.margin_lo, out.margin_hi
            break
    return cert


def _combine(a, b):
    a.evals += b.evals
    for name in ("margin_lo", "margin_hi"):
        x, y_ = getattr(a, name), getattr(b, name)
        setattr(a, name, y_ if x is None else x if y_ is None else min(x, y_))
    return a


def suite_ids(name: str) -> list[str]:
    if name not in SUITES:
        raise PreconditionError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return [k for k, v in REGISTRY.items() if v.suite == name]


def _run_one(args):
    id_, bits = args
    return verify_inequality(id_, bits=bits)


def run_suite(name: str, bits: int = DEFAULT_BITS, threads: int = 1) -> list[InequalityCert]:
    """Certify every id of a suite; results come back in registration order."""
    ids = suite_ids(name)
    jobs = [(i, bits) for i in ids]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_run_one, jobs))
    return [_run_one(j) for j in jobs]


def suite_verdict(certs: list[InequalityCert]) -> bool:
    return all(c.verdict == "verified" and c.margin_lo is not None and c.margin_lo > 0 for c in certs)
