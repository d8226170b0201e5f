"""Exact symbolic layer: certified angles and zero/sign tests.

Self-similar arc geometry needs a handful of *exact* decisions that floating
point cannot make: "is this corner angle exactly zero?", "does this vertex
lie exactly on the baseline?", "are these two triangle projections exactly
tied?".  We answer them with a thin layer over sympy:

* figure coordinates may carry exact sympy expressions (rationals, square
  roots, trig of rational multiples of pi, rational powers);
* directions that matter are certified as *rational multiples of pi*
  (`PiMultiple`), derived from a float candidate and then verified
  symbolically;
* zero/sign questions go through `sym_is_zero` / `sym_sign`, which combine a
  cheap interval evaluation with sympy simplification.

Irrational exponents coming from number-theoretic constructions enter sympy
as positive symbols; their numeric enclosures are supplied through an
environment mapping when an interval value is required.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import sympy as sp

from .intervals import PI, BoxC, Interval

# Exact rational powers like (7/15)^(2000/2001) expand inside sympy into
# integers far past the default str-conversion guard, and the dyadic
# number-theory constructions legitimately manipulate integers with ~10^5
# digits.  Raise the interpreter limit once, here, where both paths funnel.
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(max(sys.get_int_max_str_digits(), 1_000_000))

# Denominator cap when snapping a float angle to a rational multiple of pi.
# 720 covers every angle that appears in practice (degrees and half-degrees).
_MAX_ANGLE_DENOMINATOR = 720


@dataclass(frozen=True)
class PiMultiple:
    """An angle that is exactly ``frac * pi``, stored modulo 2*pi.

    The fraction is normalised to [0, 2), so the zero angle is the unique
    representative with ``frac == 0``.
    """

    frac: Fraction

    @classmethod
    def of(cls, numerator: int | Fraction, denominator: int = 1) -> "PiMultiple":
        return cls(Fraction(numerator, denominator) % 2)

    def __post_init__(self):
        object.__setattr__(self, "frac", Fraction(self.frac) % 2)

    def __add__(self, other: "PiMultiple") -> "PiMultiple":
        return PiMultiple(self.frac + other.frac)

    def __sub__(self, other: "PiMultiple") -> "PiMultiple":
        return PiMultiple(self.frac - other.frac)

    def __neg__(self) -> "PiMultiple":
        return PiMultiple(-self.frac)

    @property
    def is_zero(self) -> bool:
        return self.frac == 0

    def interval(self) -> Interval:
        """Enclosure of the angle value in [0, 2*pi)."""
        return PI * Fraction(self.frac)

    def __float__(self) -> float:
        return math.pi * float(self.frac)

    def sympy(self) -> sp.Expr:
        return sp.pi * sp.Rational(self.frac.numerator, self.frac.denominator)

    def __repr__(self) -> str:
        return f"PiMultiple({self.frac})"


# ---------------------------------------------------------------------------
# interval evaluation of sympy expressions
# ---------------------------------------------------------------------------


def interval_of_expr(expr: sp.Expr, env: Mapping[sp.Symbol, Interval] | None = None) -> Interval:
    """Rigorous interval enclosure of a real sympy expression.

    Supports the constant grammar used by figure specs (rationals, sqrt,
    sin/cos/tan of rational multiples of pi, powers with rational or
    symbol-valued exponents) plus free symbols bound to intervals in `env`.
    Falls back to a 60-digit mpmath evaluation bracketed by +-2 ulp for any
    constant subexpression outside that grammar.
    """
    env = env or {}
    return _iv_eval(sp.sympify(expr), env)


def _iv_eval(expr: sp.Expr, env: Mapping[sp.Symbol, Interval]) -> Interval:
    if isinstance(expr, sp.Integer):
        return Interval.of(int(expr))
    if isinstance(expr, sp.Rational):
        return Interval.from_fraction(Fraction(int(expr.p), int(expr.q)))
    if isinstance(expr, sp.Float):
        # sympy Floats are binary; for ordinary precision they convert exactly
        return Interval.exact(float(expr))
    if expr is sp.pi:
        return PI
    if isinstance(expr, sp.Symbol):
        if expr in env:
            return env[expr]
        raise ValueError(f"unbound symbol {expr} in interval evaluation")
    if isinstance(expr, sp.Add):
        acc = Interval.exact(0.0)
        for a in expr.args:
            acc = acc + _iv_eval(a, env)
        return acc
    if isinstance(expr, sp.Mul):
        acc = Interval.exact(1.0)
        for a in expr.args:
            acc = acc * _iv_eval(a, env)
        return acc
    if isinstance(expr, sp.Pow):
        base = _iv_eval(expr.base, env)
        e = expr.exp
        if isinstance(e, sp.Integer):
            n = int(e)
            if n == -1:
                return 1 / base
            acc = Interval.exact(1.0)
            for _ in range(abs(n)):
                acc = acc * base
            return acc if n >= 0 else 1 / acc
        if isinstance(e, sp.Rational) and e == sp.Rational(1, 2):
            return base.sqrt()
        # general positive-base power
        return base.power(_iv_eval(e, env))
    if isinstance(expr, sp.sin):
        return _iv_eval(expr.args[0], env).sin()
    if isinstance(expr, sp.cos):
        return _iv_eval(expr.args[0], env).cos()
    if isinstance(expr, sp.tan):
        return _iv_eval(expr.args[0], env).tan()
    if isinstance(expr, sp.log):
        return _iv_eval(expr.args[0], env).log()
    if isinstance(expr, sp.exp):
        return _iv_eval(expr.args[0], env).exp()
    if not expr.free_symbols:
        # constant outside the structured grammar: bracket a high-precision
        # evaluation (mpmath error < 1 ulp at 60 digits dwarfed by the widening)
        v = float(sp.N(expr, 60))
        eps = max(abs(v), 1e-300) * 1e-50
        return Interval(v - eps, v + eps)
    raise ValueError(f"cannot evaluate {expr!r} over intervals")


# ---------------------------------------------------------------------------
# zero / sign certification
# ---------------------------------------------------------------------------


_DEEP_RADICAL_DEN = 64


def _small_exponent(e: sp.Expr) -> bool:
    if isinstance(e, sp.Integer):
        return abs(int(e)) <= 8
    if isinstance(e, sp.Rational):
        return e.q <= _DEEP_RADICAL_DEN and abs(e.p) <= 4096
    return False


def _abstract_deep_radicals(expr: sp.Expr) -> tuple[sp.Expr, bool]:
    """Replace powers with unwieldy constant exponents by fresh symbols.

    ``simplify``/``cancel`` model ``c**(p/q)`` as a degree-``q`` polynomial
    generator, which is intractable for the exponents that arise from measure
    coordinates (huge rationals levels deep, or quadratic irrationals).  The
    identities we certify cancel in small integer powers of these radicals,
    so per base we pick a reference exponent and substitute ``t**n`` whenever
    every exponent in the group is a small integer multiple ``n`` of it.  A
    zero of the abstracted expression is a zero of the original (the
    substitution is a specialisation); the converse need not hold, so callers
    may only trust ``True`` outcomes obtained through it.
    """
    pows = [p for p in expr.atoms(sp.Pow)
            if not p.exp.free_symbols and not _small_exponent(p.exp)]
    if not pows:
        return expr, False
    reps: dict[sp.Expr, sp.Expr] = {}
    by_base: dict[sp.Expr, list[sp.Pow]] = {}
    for p in pows:
        by_base.setdefault(p.base, []).append(p)
    for group in by_base.values():
        group.sort(key=sp.default_sort_key)
        positive = group[0].base.is_positive is True
        e0 = group[0].exp
        ratios = [sp.simplify(p.exp / e0) for p in group]
        if all(r.is_Rational for r in ratios):
            denom = math.lcm(*[int(r.q) for r in ratios])
            numers = [int(r.p) * (denom // int(r.q)) for r in ratios]
            if all(abs(n) <= 64 for n in numers):
                t = sp.Dummy(positive=True) if positive else sp.Dummy()
                for p, npow in zip(group, numers):
                    reps[p] = t ** npow
                continue
        for p in group:
            reps[p] = sp.Dummy(positive=True) if positive else sp.Dummy()
    return expr.xreplace(reps), True


def sym_is_zero(expr: sp.Expr) -> bool | None:
    """Certified zero test for a sympy expression.

    Returns True/False when certain, None when sympy cannot decide.  Free
    symbols are allowed only if the zero/nonzero status is structural (holds
    for every admissible value); positive symbols that merely scale an
    expression are handled by sympy's factoring.
    """
    expr = sp.sympify(expr)
    if expr.is_zero is True:
        return True
    if expr.is_zero is False and expr.is_number:
        return False
    probe, abstracted = _abstract_deep_radicals(expr)
    simplified = sp.simplify(probe)
    if simplified.is_zero is True:
        return True
    rewritten = sp.simplify(simplified.rewrite(sp.cos))
    if rewritten.is_zero is True:
        return True
    if abstracted:
        # a nonzero abstraction proves nothing (radical relations were lost);
        # fall back to high-precision numerics on the concrete expression
        if expr.is_number:
            v = sp.N(expr, 120)
            if v != 0:
                return False
        return None
    if rewritten.is_number:
        result = rewritten.equals(0)
        if result is not None:
            return bool(result)
    else:
        # strip positive factors and retry on the remaining part
        stripped = _strip_positive_factors(rewritten)
        if stripped is not rewritten:
            return sym_is_zero(stripped)
        result = rewritten.equals(0)
        if result is not None:
            return bool(result)
    return None


def _strip_positive_factors(expr: sp.Expr) -> sp.Expr:
    if not isinstance(expr, sp.Mul):
        return expr
    rest = []
    for factor in expr.args:
        if factor.is_positive is True:
            continue
        rest.append(factor)
    if len(rest) == len(expr.args):
        return expr
    return sp.Mul(*rest) if rest else sp.Integer(1)


def sym_sign(expr: sp.Expr, env: Mapping[sp.Symbol, Interval] | None = None) -> int | None:
    """Certified sign (-1, 0, +1) of a real expression, or None.

    Tries the interval enclosure first (fast, decides every non-degenerate
    case), then the symbolic zero test, then sympy's assumptions.
    """
    expr = sp.sympify(expr)
    try:
        iv = interval_of_expr(expr, env)
        if iv.is_positive():
            return 1
        if iv.is_negative():
            return -1
    except (ValueError, ZeroDivisionError, ArithmeticError):
        pass
    z = sym_is_zero(expr)
    if z is True:
        return 0
    if expr.is_positive is True:
        return 1
    if expr.is_negative is True:
        return -1
    if z is False and expr.is_number:
        # nonzero number whose interval straddles zero only through widening:
        # push precision
        v = sp.N(expr, 120)
        if v != 0:
            return 1 if v > 0 else -1
    return None


# ---------------------------------------------------------------------------
# certified direction of an exact complex vector
# ---------------------------------------------------------------------------


def certified_arg(re_expr: sp.Expr, im_expr: sp.Expr,
                  env: Mapping[sp.Symbol, Interval] | None = None) -> PiMultiple | None:
    """The exact argument of (re, im) as a rational multiple of pi, if it is one.

    The candidate comes from a float atan2; it is accepted only after a
    symbolic proof that rotating the vector by the negated candidate lands on
    the positive real axis.  Returns None when no certified rational multiple
    is found (the direction may simply be irrational).
    """
    try:
        box = BoxC(interval_of_expr(re_expr, env), interval_of_expr(im_expr, env))
    except (ValueError, ZeroDivisionError):
        return None
    angle = math.atan2(box.im.mid, box.re.mid)
    cand = Fraction(angle / math.pi).limit_denominator(_MAX_ANGLE_DENOMINATOR)
    if abs(float(cand) * math.pi - angle) > 1e-6:
        return None
    theta = sp.pi * sp.Rational(cand.numerator, cand.denominator)
    w = (sp.sympify(re_expr) + sp.I * sp.sympify(im_expr)) * sp.exp(-sp.I * theta)
    im_w = sp.im(w)
    if not im_w.free_symbols:
        # cheap numeric reject before attempting a symbolic proof
        probe = sp.N(im_w, 40)
        if probe.is_number and abs(probe) > sp.Float("1e-30", 40):
            return None
    im_zero = sym_is_zero(im_w)
    if im_zero is not True:
        return None
    re_sign = sym_sign(sp.re(w), env)
    if re_sign == 1:
        return PiMultiple.of(cand)
    if re_sign == -1:
        return PiMultiple.of(cand + 1)
    return None


def exact_direction_between(vec_a: tuple[sp.Expr, sp.Expr], vec_b: tuple[sp.Expr, sp.Expr],
                            env: Mapping[sp.Symbol, Interval] | None = None) -> bool | None:
    """Certified test that two exact vectors point in the *same* direction.

    Returns True when a*conj(b) is a positive real, False when certified not,
    None when undecided.  Used for degenerate-corner detection when the
    individual directions are not rational multiples of pi.
    """
    a = sp.sympify(vec_a[0]) + sp.I * sp.sympify(vec_a[1])
    b = sp.sympify(vec_b[0]) + sp.I * sp.sympify(vec_b[1])
    prod = sp.expand(a * sp.conjugate(b))
    im_zero = sym_is_zero(sp.im(prod))
    if im_zero is False:
        return False
    if im_zero is not True:
        return None
    s = sym_sign(sp.re(prod), env)
    if s is None:
        return None
    return s > 0
