"""Interval-arithmetic certification of ``margin > 0`` over parameter regions.

A margin is a sympy expression.  It is compiled into a closure over an mpmath
interval context; subexpressions free of box variables are evaluated once.
Boxes are bisected until the enclosure is positive, a point evaluation is
non-positive (a counterexample, re-checked at doubled precision), or the
depth/evaluation caps are hit (indeterminate).  A mean-value (centred) form
built from symbolic gradients is tried before each split.

Integer-parameter tails are certified separately, either by a rational
function whose numerator and denominator have coefficients of one sign after
the shift ``t = t0 + s``, or by a registered monotonicity argument.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import sympy

from ..intervals import DEFAULT_BITS, MAX_BITS, context, decimal_ceil, decimal_floor, endpoints, iv


class CompileError(ValueError):
    pass


def _imax(ctx, a, b):
    (alo, ahi), (blo, bhi) = endpoints(a), endpoints(b)
    lo = a if alo is None else (b if blo is None else (a if alo >= blo else b))
    hi = a if ahi is None else (b if bhi is None else (a if ahi >= bhi else b))
    return ctx.mpf([lo.a, hi.b])


def _imin(ctx, a, b):
    (alo, ahi), (blo, bhi) = endpoints(a), endpoints(b)
    lo = a if alo is None else (b if blo is None else (a if alo <= blo else b))
    hi = a if ahi is None else (b if bhi is None else (a if ahi <= bhi else b))
    return ctx.mpf([lo.a, hi.b])


def compile_iv(expr: sympy.Expr, symbols: tuple[sympy.Symbol, ...], ctx) -> Callable:
    """Closure ``f(env)`` with ``env`` a tuple of intervals ordered like ``symbols``."""
    index = {s: k for k, s in enumerate(symbols)}
    live = set(symbols)

    def build(e) -> Callable:
        if not (e.free_symbols & live):
            if e.free_symbols:
                raise CompileError(f"unbound symbols {e.free_symbols} in {e}")
            val = const(e)
            return lambda env: val
        if e.is_Symbol:
            k = index[e]
            return lambda env: env[k]
        if e.is_Add:
            fs = [build(a) for a in e.args]

            def add(env):
                acc = fs[0](env)
                for f in fs[1:]:
                    acc = acc + f(env)
                return acc
            return add
        if e.is_Mul:
            fs = [build(a) for a in e.args]

            def mul(env):
                acc = fs[0](env)
                for f in fs[1:]:
                    acc = acc * f(env)
                return acc
            return mul
        if e.is_Pow:
            fb = build(e.base)
            if e.exp.is_Integer:
                k = int(e.exp)
                return lambda env: fb(env) ** k
            fe = build(e.exp)
            return lambda env: fb(env) ** fe(env)
        if isinstance(e, sympy.log):
            f = build(e.args[0])
            return lambda env: ctx.log(f(env))
        if isinstance(e, sympy.exp):
            f = build(e.args[0])
            return lambda env: ctx.exp(f(env))
        if isinstance(e, (sympy.Max, sympy.Min)):
            fs = [build(a) for a in e.args]
            op = _imax if isinstance(e, sympy.Max) else _imin

            def ext(env):
                acc = fs[0](env)
                for f in fs[1:]:
                    acc = op(ctx, acc, f(env))
                return acc
            return ext
        raise CompileError(f"unsupported node {type(e).__name__} in {e}")

    def const(e):
        if e.is_Rational:
            return iv(ctx, Fraction(int(e.p), int(e.q)))
        if e.is_Float:
            raise CompileError("floating constants are not allowed in certified expressions")
        if e is sympy.E:
            return ctx.exp(1)
        if e is sympy.pi:
            return ctx.pi
        return build_const(e)

    def build_const(e):
        if e.is_Add:
            acc = const(e.args[0])
            for a in e.args[1:]:
                acc = acc + const(a)
            return acc
        if e.is_Mul:
            acc = const(e.args[0])
            for a in e.args[1:]:
                acc = acc * const(a)
            return acc
        if e.is_Pow:
            b = const(e.base)
            if e.exp.is_Integer:
                return b ** int(e.exp)
            return b ** const(e.exp)
        if isinstance(e, sympy.log):
            return ctx.log(const(e.args[0]))
        if isinstance(e, sympy.exp):
            return ctx.exp(const(e.args[0]))
        if isinstance(e, (sympy.Max, sympy.Min)):
            op = _imax if isinstance(e, sympy.Max) else _imin
            acc = const(e.args[0])
            for a in e.args[1:]:
                acc = op(ctx, acc, const(a))
            return acc
        raise CompileError(f"unsupported constant {e}")

    return build(sympy.sympify(expr))


def _lower(x) -> Fraction | None:
    if not hasattr(x, "_mpi_"):
        return None  # complex enclosure: a base interval crossed zero
    lo, _ = endpoints(x)
    return lo


def _upper(x) -> Fraction | None:
    if not hasattr(x, "_mpi_"):
        return None
    _, hi = endpoints(x)
    return hi


@dataclass
class BoxOutcome:
    verdict: str
    margin_lo: Fraction | None = None
    margin_hi: Fraction | None = None
    counterexample: dict | None = None
    evals: int = 0


@dataclass
class _Compiled:
    symbols: tuple
    f: Callable
    grads: list | None


def tidy(expr: sympy.Expr) -> sympy.Expr:
    """Merge powers of a common base, so ``y**a / y`` becomes ``y**(a-1)`` (finite at 0)."""
    return sympy.powsimp(sympy.sympify(expr), combine="exp")


def _compile_all(expr, symbols, ctx, with_grads: bool) -> _Compiled:
    expr = tidy(expr)
    f = compile_iv(expr, symbols, ctx)
    grads = None
    if with_grads and symbols and not expr.has(sympy.Max, sympy.Min):
        try:
            grads = [compile_iv(tidy(sympy.diff(expr, s)), symbols, ctx) for s in symbols]
        except CompileError:
            grads = None
    return _Compiled(symbols, f, grads)


def _env(ctx, box):
    return tuple(iv(ctx, (lo, hi)) if lo != hi else iv(ctx, lo) for lo, hi in box)


def certify_box(expr: sympy.Expr, symbols: tuple, box: list[tuple[Fraction, Fraction]],
                bits: int = DEFAULT_BITS, max_depth: int = 40, max_evals: int = 20000,
                centred: bool = True) -> BoxOutcome:
    """Prove ``expr > 0`` on the box by adaptive bisection."""
    ctx = context(bits)
    comp = _compile_all(expr, symbols, ctx, centred)
    widths = [hi - lo for lo, hi in box]
    stack = [(list(box), 0)]
    out = BoxOutcome("verified")
    lows: list[Fraction] = []
    highs: list[Fraction] = []

    def point_value(pt):
        out.evals += 1
        return comp.f(_env(ctx, [(c, c) for c in pt]))

    while stack:
        b, depth = stack.pop()
        out.evals += 1
        val = comp.f(_env(ctx, b))
        lo = _lower(val)
        if lo is not None and lo > 0:
            lows.append(lo)
            continue
        mid = [(l + h) / 2 for l, h in b]
        pv = point_value(mid)
        phi = _upper(pv)
        if phi is not None:
            highs.append(phi)
        if phi is not None and phi <= 0:
            return _counterexample(expr, symbols, mid, bits, out)
        if comp.grads is not None and any(l != h for l, h in b):
            env = _env(ctx, b)
            out.evals += len(comp.grads)
            enc = pv
            for k, g in enumerate(comp.grads):
                l, h = b[k]
                if l == h:
                    continue
                enc = enc + g(env) * (iv(ctx, (l, h)) - iv(ctx, mid[k]))
            lo2 = _lower(enc)
            if lo2 is not None and lo2 > 0:
                lows.append(lo2 if lo is None else max(lo, lo2))
                continue
        if depth >= max_depth or out.evals >= max_evals or all(l == h for l, h in b):
            out.verdict = "indeterminate"
            out.counterexample = {str(s): str(c) for s, c in zip(symbols, mid)}
            break
        k = max(range(len(b)), key=lambda i: (b[i][1] - b[i][0]) / widths[i] if widths[i] else -1)
        l, h = b[k]
        c = (l + h) / 2
        left, right = list(b), list(b)
        left[k] = (l, c)
        right[k] = (c, h)
        stack.append((right, depth + 1))
        stack.append((left, depth + 1))
    if out.verdict == "verified":
        out.margin_lo = min(lows) if lows else None
        out.margin_hi = min(highs) if highs else None
        if out.margin_hi is None:
            pv = point_value([(l + h) / 2 for l, h in box])
            out.margin_hi = _upper(pv)
    return out


def _counterexample(expr, symbols, pt, bits, out: BoxOutcome) -> BoxOutcome:
    """Re-evaluate a failing point at doubled precision before reporting it."""
    bits2 = min(2 * bits, MAX_BITS) if bits < MAX_BITS else bits
    ctx2 = context(bits2)
    f2 = compile_iv(tidy(expr), symbols, ctx2)
    v2 = f2(_env(ctx2, [(c, c) for c in pt]))
    out.evals += 1
    hi2 = _upper(v2)
    point = {str(s): str(c) for s, c in zip(symbols, pt)}
    if hi2 is not None and hi2 <= 0:
        out.verdict = "failed"
        lo2 = _lower(v2)
        out.margin_lo = lo2
        out.margin_hi = hi2
        out.counterexample = point
    else:
        out.verdict = "indeterminate"
        out.counterexample = point
    return out


@dataclass(frozen=True)
class TailOutcome:
    verdict: str
    value_at_start: Fraction
    numerator_coeffs: tuple[int, ...]
    denominator_coeffs: tuple[int, ...]


def certify_rational_tail(expr: sympy.Expr, t: sympy.Symbol, t0: int) -> TailOutcome:
    """Prove ``expr(t) > 0`` for all real ``t >= t0`` by coefficient signs after ``t = t0 + s``."""
    s = sympy.Symbol("s", nonnegative=True)
    num, den = sympy.fraction(sympy.cancel(sympy.together(expr)))
    pn = sympy.Poly(sympy.expand(num.subs(t, t0 + s)), s)
    pd = sympy.Poly(sympy.expand(den.subs(t, t0 + s)), s)
    cn = tuple(int(c) for c in pn.all_coeffs()[::-1])
    cd = tuple(int(c) for c in pd.all_coeffs()[::-1])

    def one_sign(cs):
        if cs[0] == 0:
            return 0
        sign = 1 if cs[0] > 0 else -1
        return sign if all(c * sign >= 0 for c in cs) else 0

    sn, sd = one_sign(cn), one_sign(cd)
    ok = sn != 0 and sd != 0 and sn == sd
    value = Fraction(cn[0], cd[0]) if cd[0] else None
    return TailOutcome("verified" if ok else "indeterminate", value, cn, cd)


@dataclass(frozen=True)
class Region:
    """Quantifier domain of an inequality.

    ``ints``: inclusive integer ranges, iterated exhaustively.
    ``box``: maps the integer values to a rational box for the continuous symbols.
    ``points``: explicit rational points, used when there is no box.
    ``tail_from``: for rational-tail certificates, the start of ``t >= t0``.
    """

    ints: tuple[tuple[str, int, int], ...] = ()
    box: Callable[[dict], list[tuple[sympy.Symbol, Fraction, Fraction]]] | None = None
    box_text: tuple[tuple[str, str, str], ...] = ()
    points: tuple[dict, ...] = ()
    tail_from: int | None = None
    constraint: str = ""
    max_depth: int = 40
    max_evals: int = 20000

    def int_points(self):
        names = [n for n, _, _ in self.ints]
        ranges = [range(lo, hi + 1) for _, lo, hi in self.ints]
        for combo in itertools.product(*ranges):
            yield dict(zip(names, combo))

    def to_json(self) -> dict:
        out: dict = {}
        if self.ints:
            out["ints"] = {n: [lo, hi] for n, lo, hi in self.ints}
        if self.box_text:
            out["box"] = {n: [lo, hi] for n, lo, hi in self.box_text}
        if self.points:
            out["points"] = len(self.points)
        if self.tail_from is not None:
            out["tail"] = f"t >= {self.tail_from}"
        if self.constraint:
            out["constraint"] = self.constraint
        return out


@dataclass
class InequalityCert:
    id: str
    region: dict
    verdict: str
    margin_lo: Fraction | None
    margin_hi: Fraction | None
    bits: int
    evals: int = 0
    counterexample: dict | None = None
    reduction: str = ""
    values: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "id": self.id,
            "region": self.region,
            "verdict": self.verdict,
            "margin_lo": None if self.margin_lo is None else decimal_floor(self.margin_lo, 30),
            "margin_hi": None if self.margin_hi is None else decimal_ceil(self.margin_hi, 30),
            "bits": self.bits,
            "evals": self.evals,
        }
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        if self.values:
            out["values"] = {k: v.to_json(20) for k, v in sorted(self.values.items())}
        return out
