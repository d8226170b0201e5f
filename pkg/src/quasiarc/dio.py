"""Exact arithmetic for Diophantine approximation scheduling.

This module builds irrational numbers of the form ``tau = 1 + sum(2**-n_i)``
where the exponent schedule ``n_1 < n_2 < ...`` grows fast enough to control
how well ``tau`` is approximated by rationals.  Everything is computed with
integers and ``Fraction``; numbers are never expanded to positional form, and
any step that would require materialising ``2**e`` for an oversized ``e``
raises :class:`OverflowPolicyError` instead of thrashing memory.

Main entry points:

* the four schedule constructors :func:`tau_7_11` .. :func:`tau_7_14`,
* :func:`dist_to_integer` -- certified bracket of ``dist(j*tau, Z)``,
* :class:`QuadSurd` -- exact numbers ``a + b*sqrt(2)``,
* :func:`j_a_evidence` -- scans ``q_j = j * exp(a*j) * dist(j*tau, Z)`` and
  reports whether the data supports ``inf_j q_j > 0``.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt

from .intervals import Interval, _down, _up

# stream exponents are huge integers; allow printing/serialising them
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(max(sys.get_int_max_str_digits(), 1_000_000))

__all__ = [
    "OverflowPolicyError",
    "IrrationalRequired",
    "DyadicStream",
    "QuadSurd",
    "Witness",
    "JaReport",
    "tau_7_11",
    "tau_7_12",
    "tau_7_13",
    "tau_7_14",
    "dist_to_integer",
    "j_a_evidence",
    "log_fraction_bracket",
    "sqrt2_convergent_denominators",
]

DEFAULT_BIT_BUDGET = 1_000_000

EVIDENCE_FOR = "EvidenceFor"
EVIDENCE_AGAINST = "EvidenceAgainst"
UNKNOWN = "Unknown"


class OverflowPolicyError(OverflowError):
    """A computation would materialise an integer beyond the bit budget."""


class IrrationalRequired(TypeError):
    """The requested quantity is only meaningful for irrational input."""


# --------------------------------------------------------------------------
# rational brackets of ln 2 (and 1/ln 2), from the series ln2 = sum 1/(k 2^k)


def _ln2_bracket(terms: int = 256) -> tuple[Fraction, Fraction]:
    s = Fraction(0)
    for k in range(1, terms + 1):
        s += Fraction(1, k << k)
    # tail is between 0 and sum_{k>terms} 2^-k = 2^-terms (divided by k>terms)
    return s, s + Fraction(1, (terms + 1) * (1 << terms))


LN2_LO, LN2_HI = _ln2_bracket()
INV_LN2_LO = 1 / LN2_HI
INV_LN2_HI = 1 / LN2_LO


def _ceil_frac(fr: Fraction) -> int:
    return -((-fr.numerator) // fr.denominator)


def _floor_log2(fr: Fraction) -> int:
    """Exact floor(log2(fr)) for fr > 0."""
    if fr <= 0:
        raise ValueError("positive value required")
    n, d = fr.numerator, fr.denominator
    e = n.bit_length() - d.bit_length()
    # n/d lies in (2**(e-1), 2**(e+1)); one comparison settles the floor
    if e >= 0:
        return e if n >= d << e else e - 1
    return e if n << -e >= d else e - 1


def log_fraction_bracket(fr: Fraction, terms: int = 128) -> tuple[Fraction, Fraction]:
    """Rational bracket of ln(fr) for a positive rational, via the atanh series.

    ln(fr) = 2 * sum_{m>=0} x^(2m+1)/(2m+1) with x = (fr-1)/(fr+1).
    """
    fr = Fraction(fr)
    if fr <= 0:
        raise ValueError("positive value required")
    if fr == 1:
        return Fraction(0), Fraction(0)
    if fr < 1:
        lo, hi = log_fraction_bracket(1 / fr, terms)
        return -hi, -lo
    x = (fr - 1) / (fr + 1)
    xx = x * x
    s = Fraction(0)
    t = x
    for m in range(terms):
        s += t / (2 * m + 1)
        t *= xx
    tail = t / ((2 * terms + 1) * (1 - xx))
    return 2 * s, 2 * (s + tail)


def _require_budget(exponent: int, budget: int, what: str) -> None:
    if exponent > budget:
        size = str(exponent) if exponent.bit_length() <= 64 else f"~2**{exponent.bit_length()}"
        raise OverflowPolicyError(
            f"{what} would need a {size}-bit integer; budget is {budget} bits"
        )


def _pow2(exponent: int, budget: int, what: str) -> int:
    _require_budget(exponent, budget, what)
    return 1 << exponent


# --------------------------------------------------------------------------
# dyadic streams


@dataclass(frozen=True)
class Witness:
    """One certified good rational approximation ``k / j`` of a stream value.

    ``j = 2**j_log2`` and ``k = j * truncation`` are materialised only when
    they fit the bit budget; the approximation gap ``j*tau - k`` always comes
    with a log2 bracket, either directly (``gap_log2``) or, when even the
    exponent overflows, as a bracket on ``log2(-log2 gap)``.
    """

    index: int
    j_log2: int
    j: int | None
    k: int | None
    gap_log2: tuple[int, int] | None
    gap_neglog2_floor: int | None = None

    def as_dict(self) -> dict:
        return {
            "index": self.index,
            "j_log2": self.j_log2,
            "j": self.j,
            "k": self.k,
            "gap_log2": list(self.gap_log2) if self.gap_log2 else None,
            "gap_neglog2_floor": self.gap_neglog2_floor,
        }


@dataclass(frozen=True)
class DyadicStream:
    """A number ``1 + sum_i 2**-exponents[i]`` with a certified tail bound.

    ``exponents`` is the strictly increasing prefix that has been generated.
    ``next_exponent`` is the exact next exponent when it fits the bit budget;
    ``next_exponent_floor`` is always a valid lower bound for it, so the tail
    after the stored prefix lies in ``(0, 2**-(next_exponent_floor - 1))``.
    ``next_m_log2`` bounds log2 of the next gap ``n_{i+1} - n_i`` from below
    and is exact for the doubly-exponential schedules.
    """

    kind: str
    exponents: tuple[int, ...]
    next_exponent: int | None
    next_exponent_floor: int
    next_m_log2: int | None
    bit_budget: int = DEFAULT_BIT_BUDGET
    params: tuple[tuple[str, object], ...] = ()

    @property
    def terms(self) -> int:
        return len(self.exponents)

    def _exp_after(self, i: int) -> int | None:
        """n_{i+1} (1-based i), or None when not exactly known."""
        if i < self.terms:
            return self.exponents[i]
        return self.next_exponent

    def _exp_after_floor(self, i: int) -> int:
        if i < self.terms:
            return self.exponents[i]
        return self.next_exponent_floor

    def max_materialisable(self) -> int:
        """Largest truncation order whose value fits the bit budget."""
        i = 0
        for n in self.exponents:
            if n > self.bit_budget:
                break
            i += 1
        return i

    def truncation(self, i: int | None = None) -> Fraction:
        """The partial sum ``1 + sum_{l<=i} 2**-n_l`` as an exact Fraction."""
        if i is None:
            i = self.terms
        if not 0 <= i <= self.terms:
            raise ValueError(f"truncation order must be in 0..{self.terms}")
        total = Fraction(1)
        for n in self.exponents[:i]:
            total += Fraction(1, _pow2(n, self.bit_budget, "truncation"))
        return total

    def tail_log2_bounds(self, i: int | None = None) -> tuple[int | None, int | None]:
        """Bracket ``(lo, hi)`` with ``2**lo < tau - truncation(i) < 2**hi``.

        ``lo`` is None when the next exponent past the prefix is unknown,
        ``hi`` is None when even its lower bound overflows the budget (the
        tail is then smaller than ``2**-bit_budget``).
        """
        if i is None:
            i = self.terms
        if not 0 <= i <= self.terms:
            raise ValueError(f"truncation order must be in 0..{self.terms}")
        nxt = self._exp_after(i)
        lo = None if nxt is None else -nxt
        fl = self._exp_after_floor(i)
        hi: int | None = -fl + 1
        if fl - 1 > self.bit_budget:
            hi = None
        return lo, hi

    def tail_upper(self, i: int | None = None) -> Fraction:
        """A materialisable Fraction upper bound for ``tau - truncation(i)``."""
        _, hi = self.tail_log2_bounds(i)
        e = self.bit_budget if hi is None else min(-hi, self.bit_budget)
        return Fraction(1, 1 << e)

    def value_interval(self) -> Interval:
        i = self.max_materialisable()
        base = Interval.from_fraction(self.truncation(i))
        tail = float(self.tail_upper(i))
        if tail == 0.0:
            tail = 5e-324
        return Interval(base.lo, base.hi + tail)

    def __float__(self) -> float:
        return self.value_interval().mid

    def witness(self, i: int) -> Witness:
        """The approximation ``k_i / j_i`` with ``j_i = 2**n_i``."""
        if not 1 <= i <= self.terms:
            raise ValueError(f"witness index must be in 1..{self.terms}")
        n = self.exponents[i - 1]
        j = k = None
        if n <= self.bit_budget:
            j = 1 << n
            # j * truncation(i) = 2**n + sum_{l<=i} 2**(n - n_l) is an integer
            k = j + sum(1 << (n - m) for m in self.exponents[:i])
        nxt = self._exp_after(i)
        gap = None if nxt is None else (n - nxt, n - nxt + 1)
        neg_floor = None
        if gap is None and self.next_m_log2 is not None:
            # gap < 2**(n - n_{i+1} + 1) <= 2**-(2**next_m_log2 - n - 1),
            # so -log2(gap) > 2**next_m_log2 + n - 1 >= 2**(next_m_log2 - 1)
            # whenever next_m_log2 exceeds ~bit_length(n); certify that.
            if self.next_m_log2 - 1 >= n.bit_length() + 1:
                neg_floor = self.next_m_log2 - 1
        return Witness(i, n, j, k, gap, neg_floor)

    def witnesses(self) -> tuple[Witness, ...]:
        return tuple(self.witness(i) for i in range(1, self.terms + 1))

    def extend(self, extra: int) -> "DyadicStream":
        """A fresh stream of the same kind with ``extra`` more terms."""
        ctor = _CONSTRUCTORS[self.kind]
        kw = dict(self.params)
        kw["terms"] = self.terms + extra
        kw["bit_budget"] = self.bit_budget
        return ctor(**kw)

    def as_dict(self) -> dict:
        out: dict = {"kind": self.kind, "exponents": list(self.exponents)}
        for name, val in self.params:
            out[name] = [val.numerator, val.denominator] if isinstance(val, Fraction) else val
        out["bit_budget"] = self.bit_budget
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "DyadicStream":
        kind = data["kind"]
        ctor = _CONSTRUCTORS[kind]
        kw = {}
        for name in _CONSTRUCTOR_PARAMS[kind]:
            val = data[name]
            kw[name] = Fraction(*val) if isinstance(val, list) else val
        kw["terms"] = len(data["exponents"])
        kw["bit_budget"] = data.get("bit_budget", DEFAULT_BIT_BUDGET)
        stream = ctor(**kw)
        stored = [int(e) for e in data["exponents"]]
        if list(stream.exponents) != stored:
            raise ValueError("stored exponents do not match the schedule")
        return stream


def _ratio_ceil_hi(a0: Fraction, n: int, budget: int) -> int:
    """ceil of an upper bracket of 2**n * a0 / ln2 (deterministic)."""
    p = _pow2(n, budget, "schedule step")
    return _ceil_frac(a0 * p * INV_LN2_HI)


def _schedule(kind, params, m1, step, terms, budget, next_m_log2_fn):
    if terms < 1:
        raise ValueError("at least one term is required")
    ns = [m1]
    for _ in range(terms - 1):
        ns.append(ns[-1] + step(ns[-1]))
    # exact next exponent when it still fits; otherwise a certified floor
    nxt: int | None
    m_log2: int | None
    try:
        m = step(ns[-1])
        nxt = ns[-1] + m
        m_log2 = _floor_log2(Fraction(m)) if m > 0 else None
    except OverflowPolicyError:
        nxt = None
        m_log2 = next_m_log2_fn(ns[-1])
    floor = nxt
    if floor is None:
        cap = m_log2 if (m_log2 is not None and m_log2 <= 64) else 64
        floor = ns[-1] + (1 << cap)
    return DyadicStream(
        kind=kind,
        exponents=tuple(ns),
        next_exponent=nxt,
        next_exponent_floor=floor,
        next_m_log2=m_log2,
        bit_budget=budget,
        params=params,
    )


def _as_positive_fraction(a0, name: str) -> Fraction:
    a = Fraction(a0)
    if a <= 0:
        raise ValueError(f"{name} must be positive")
    return a


def tau_7_11(a0, nu: int = 8, terms: int = 2, *, bit_budget: int = DEFAULT_BIT_BUDGET) -> DyadicStream:
    """Schedule with step ``max(ceil(2**n * a0/ln2) - n, n + 2)``.

    Approximation gaps decay like ``exp(-a0 * j)`` along the witnesses, at
    the threshold rate ``a0``.
    """
    a = _as_positive_fraction(a0, "a0")
    step = lambda n: max(_ratio_ceil_hi(a, n, bit_budget) - n, n + 2)

    def floor_m(n: int) -> int | None:
        # m >= 2**n a0/ln2 - n >= 2**(n-1) a0/ln2 once n dominates, so
        # log2 m >= n - 1 + floor_log2(a0/ln2)
        return n - 1 + _floor_log2(a * INV_LN2_LO)

    return _schedule("7.11", (("a0", a), ("nu", nu)), max(8, nu + 1), step, terms, bit_budget, floor_m)


def tau_7_12(a0, nu: int = 8, terms: int = 2, *, bit_budget: int = DEFAULT_BIT_BUDGET) -> DyadicStream:
    """Schedule with step ``n + max(ceil(2**n * a0/ln2), 2)``.

    Gaps decay just faster than ``exp(-a0 * j)``: the threshold rate is
    approached but never attained.
    """
    a = _as_positive_fraction(a0, "a0")
    step = lambda n: n + max(_ratio_ceil_hi(a, n, bit_budget), 2)

    def floor_m(n: int) -> int | None:
        return n - 1 + _floor_log2(a * INV_LN2_LO)

    return _schedule("7.12", (("a0", a), ("nu", nu)), max(8, nu + 1), step, terms, bit_budget, floor_m)


def tau_7_13(nu: int = 8, terms: int = 2, *, bit_budget: int = DEFAULT_BIT_BUDGET) -> DyadicStream:
    """Schedule with step ``2**(n/2)`` (exponents stay even).

    Gaps decay sub-exponentially in ``j``, so approximations are never
    exponentially good at any positive rate.
    """
    step = lambda n: _pow2(n // 2, bit_budget, "schedule step")
    return _schedule("7.13", (("nu", nu),), max(8, 2 * nu), step, terms, bit_budget, lambda n: n // 2)


def tau_7_14(nu: int = 8, terms: int = 2, *, bit_budget: int = DEFAULT_BIT_BUDGET) -> DyadicStream:
    """Schedule with step ``2**(2n)``.

    Gaps decay super-exponentially: along the witnesses the quality beats
    every rate ``exp(-a * j)``, and in fact ``gap_i < 2**(-j_i**2 + 1)``.
    """
    step = lambda n: _pow2(2 * n, bit_budget, "schedule step")
    return _schedule("7.14", (("nu", nu),), max(8, nu + 1), step, terms, bit_budget, lambda n: 2 * n)


_CONSTRUCTORS = {"7.11": tau_7_11, "7.12": tau_7_12, "7.13": tau_7_13, "7.14": tau_7_14}
_CONSTRUCTOR_PARAMS = {"7.11": ("a0", "nu"), "7.12": ("a0", "nu"), "7.13": ("nu",), "7.14": ("nu",)}


# --------------------------------------------------------------------------
# quadratic surds a + b*sqrt(2)


def sqrt2_convergent_denominators(count: int = 10) -> list[int]:
    """Denominators of the continued-fraction convergents of sqrt(2)."""
    out = [1, 2]
    while len(out) < count:
        out.append(2 * out[-1] + out[-2])
    return out[:count]


def _sqrt2_bracket(bits: int = 128) -> tuple[Fraction, Fraction]:
    r = isqrt(2 << (2 * bits))
    return Fraction(r, 1 << bits), Fraction(r + 1, 1 << bits)


_SQRT2_LO, _SQRT2_HI = _sqrt2_bracket()


@dataclass(frozen=True)
class QuadSurd:
    """Exact arithmetic in Q(sqrt(2)): the number ``a + b*sqrt(2)``."""

    a: Fraction
    b: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def sign(self) -> int:
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return 1 if b > 0 else -1
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # mixed signs: compare a**2 with 2*b**2 (sign of a+b*sqrt2 follows
        # the larger magnitude side; equality is impossible for b != 0)
        if a * a == 2 * b * b:
            raise ArithmeticError("sqrt(2) cannot be rational")
        big_a = a * a > 2 * b * b
        return (1 if a > 0 else -1) if big_a else (1 if b > 0 else -1)

    def __add__(self, other: "QuadSurd | Fraction | int") -> "QuadSurd":
        if isinstance(other, QuadSurd):
            return QuadSurd(self.a + other.a, self.b + other.b)
        return QuadSurd(self.a + other, self.b)

    __radd__ = __add__

    def __sub__(self, other: "QuadSurd | Fraction | int") -> "QuadSurd":
        if isinstance(other, QuadSurd):
            return QuadSurd(self.a - other.a, self.b - other.b)
        return QuadSurd(self.a - other, self.b)

    def __rsub__(self, other: "Fraction | int") -> "QuadSurd":
        return QuadSurd(other - self.a, -self.b)

    def __neg__(self) -> "QuadSurd":
        return QuadSurd(-self.a, -self.b)

    def __mul__(self, other: "QuadSurd | Fraction | int") -> "QuadSurd":
        if isinstance(other, QuadSurd):
            return QuadSurd(
                self.a * other.a + 2 * self.b * other.b,
                self.a * other.b + self.b * other.a,
            )
        return QuadSurd(self.a * other, self.b * other)

    __rmul__ = __mul__

    def bracket(self) -> tuple[Fraction, Fraction]:
        lo = self.a + self.b * (_SQRT2_LO if self.b >= 0 else _SQRT2_HI)
        hi = self.a + self.b * (_SQRT2_HI if self.b >= 0 else _SQRT2_LO)
        return lo, hi

    def interval(self) -> Interval:
        lo, hi = self.bracket()
        return Interval(Interval.from_fraction(lo).lo, Interval.from_fraction(hi).hi)

    def __float__(self) -> float:
        return self.interval().mid

    def floor(self) -> int:
        lo, hi = self.bracket()
        n = lo.numerator // lo.denominator
        # the bracket is ~2**-128 wide; at most one adjustment is needed
        while (self - (n + 1)).sign() >= 0:
            n += 1
        while (self - n).sign() < 0:
            n -= 1
        return n

    def nearest_integer(self) -> int:
        n = self.floor()
        return n + 1 if (self - n - Fraction(1, 2)).sign() > 0 else n

    def dist_to_integer_exact(self) -> "QuadSurd":
        d = self - self.nearest_integer()
        return d if d.sign() >= 0 else -d


# --------------------------------------------------------------------------
# certified distance to the nearest integer


def _outward_interval(lo: Fraction, hi: Fraction) -> Interval:
    """Enclose [lo, hi] in floats, nudging outward even at exact endpoints.

    The unconditional nudge keeps float brackets monotone under refinement:
    when exact ranges nest, so do their float enclosures.
    """
    return Interval(_down(float(lo)), _up(float(hi)))


def _frac_dist(fr: Fraction) -> Fraction:
    r = fr - (fr.numerator // fr.denominator)
    return min(r, 1 - r)


@lru_cache(maxsize=256)
def _cached_truncation(stream: DyadicStream, i: int) -> Fraction:
    return stream.truncation(i)


def _tail_width_float(stream: DyadicStream, i: int, j: int) -> float:
    """Float upper bound for ``j * (tau - truncation(i))``."""
    _, hi = stream.tail_log2_bounds(i)
    e = stream.bit_budget if hi is None else -hi
    if e - j.bit_length() > 1074:
        return 5e-324
    return _up(math.ldexp(float(j), -min(e, 1 << 30)))


def _stream_dist_level(j: int, stream: DyadicStream, i: int) -> Interval:
    """Bracket dist(j*tau, Z) from the order-i truncation.

    dist is 1-Lipschitz, so the value at ``j * truncation(i)`` widened by
    ``j`` times the tail bound encloses the true distance.
    """
    d = float(_frac_dist(j * _cached_truncation(stream, i)))
    w = _tail_width_float(stream, i, j)
    return Interval(max(0.0, _down(_down(d) - w)), min(0.5, _up(_up(d) + w)))


def dist_to_integer(j: int, tau, terms: int | None = None) -> Interval:
    """Certified bracket of ``dist(j * tau, Z)``.

    ``tau`` may be a Fraction/int (exact modular arithmetic), a
    :class:`QuadSurd`, or a :class:`DyadicStream` (exact on the stored
    prefix, widened by ``j`` times the certified tail bound).  Increasing
    ``terms`` for a stream only ever shrinks the bracket.
    """
    if j < 1:
        raise ValueError("j must be a positive integer")
    if isinstance(tau, int):
        return Interval.exact(0.0)
    if isinstance(tau, Fraction):
        q = tau.denominator
        r = (j * tau.numerator) % q
        return Interval.from_fraction(Fraction(min(r, q - r), q))
    if isinstance(tau, QuadSurd):
        lo, hi = (j * tau).dist_to_integer_exact().bracket()
        return _outward_interval(lo, max(lo, hi))
    if isinstance(tau, DyadicStream):
        i = tau.max_materialisable() if terms is None else terms
        # intersecting over the truncation orders keeps refinement monotone
        lo, hi = 0.0, 0.5
        for lvl in range(i + 1):
            piece = _stream_dist_level(j, tau, lvl)
            lo, hi = max(lo, piece.lo), min(hi, piece.hi)
        return Interval(lo, hi)
    raise TypeError(f"unsupported tau type: {type(tau).__name__}")


# --------------------------------------------------------------------------
# evidence scans for inf_j  j * exp(a j) * dist(j tau, Z)  >  0


@dataclass(frozen=True)
class _LogQ:
    """Bracket of log2(q) for one witness, possibly only at exponent level.

    ``frac`` is a direct Fraction bracket.  ``neg_floor`` set means
    ``log2 q <= -2**neg_floor`` (used when even the exponent of q is
    astronomically negative).  ``lower_known`` is False when only the upper
    end is certified: such a witness can only sit at the small end of a
    comparison.
    """

    frac: tuple[Fraction, Fraction] | None
    neg_floor: int | None = None
    lower_known: bool = True


def _certified_greater(big: _LogQ, small: _LogQ) -> bool:
    """True when q(big) > q(small) is certified from the log2 brackets."""
    if not big.lower_known:
        return False
    if big.frac is not None:
        big_lo = big.frac[0]
    else:
        # only an upper bound at exponent level: no usable lower end
        return False
    if small.frac is not None:
        return big_lo > small.frac[1]
    if small.neg_floor is None:
        return False
    # need big_lo > -2**neg_floor
    if big_lo >= 0:
        return True
    return _floor_log2(-big_lo) + 1 < small.neg_floor


def _witness_logq(stream: DyadicStream, w: Witness, a: Fraction) -> _LogQ | None:
    """log2 bracket of q = j * exp(a j) * gap for one stream witness."""
    n = w.j_log2
    if w.gap_log2 is not None and n <= stream.bit_budget:
        j = 1 << n
        term_lo = a * j * INV_LN2_LO
        term_hi = a * j * INV_LN2_HI
        return _LogQ((n + term_lo + w.gap_log2[0], n + term_hi + w.gap_log2[1]))
    if w.gap_neglog2_floor is not None:
        # log2 q <= n + a*2**n/ln2 + 1 - 2**M with M = next_m_log2 + 1 - 1;
        # certify the negative tail dominates: a*2**n/ln2 <= 2**(n+c) with
        # c = floor_log2(a/ln2)+1, and n + 2**(n+c) + 1 <= 2**(M-1) as long
        # as M - 1 > n + c (then log2 q <= -2**(M-1)).
        m = w.gap_neglog2_floor  # -log2 gap > 2**m already certified
        c = _floor_log2(a * INV_LN2_HI) + 1
        if m - 1 > max(n + c, n.bit_length() + 1):
            return _LogQ(None, neg_floor=m - 1, lower_known=False)
    return None


@dataclass(frozen=True)
class JaReport:
    """Evidence about ``inf_j q_j`` with ``q_j = j * exp(a*j) * dist(j*tau, Z)``.

    ``minima`` lists the running minima (j, nearest k, q_j) over the dense
    scan; ``witness_chain`` lists the certified log2(q) brackets along the
    stream's structured approximations, and ``chain_descending`` counts how
    many consecutive certified strict decreases they form.
    """

    a: float
    j_max: int
    q_min: float
    ln_q_min: float
    argmin_j: int
    minima: tuple[tuple[int, int, float], ...]
    witness_chain: tuple[dict, ...]
    chain_descending: int
    verdict: str
    detail: str

    def as_dict(self) -> dict:
        return {
            "a": self.a,
            "j_max": self.j_max,
            "q_min": self.q_min,
            "ln_q_min": self.ln_q_min,
            "argmin_j": self.argmin_j,
            "minima": [list(m) for m in self.minima],
            "witness_chain": list(self.witness_chain),
            "chain_descending": self.chain_descending,
            "verdict": self.verdict,
            "detail": self.detail,
        }


def _clamped_float(fr: Fraction) -> tuple[float, bool]:
    if fr == 0:
        return 0.0, False
    mag = _floor_log2(abs(fr))
    if mag > 1020:
        return (-1e308 if fr < 0 else 1e308), True
    return float(fr), False


def _logq_summary(lq: _LogQ) -> dict:
    if lq.frac is not None:
        lo, c1 = _clamped_float(lq.frac[0])
        hi, c2 = _clamped_float(lq.frac[1])
        out = {"tier": 0, "log2_q_lo": lo, "log2_q_hi": hi}
        if c1 or c2:
            out["clamped"] = True
        return out
    floor = lq.neg_floor
    if floor is not None and floor.bit_length() > 64:
        return {"tier": 1, "neglog2_q_floor_log2": floor.bit_length() - 1, "floor_is_log2": True}
    return {"tier": 1, "neglog2_q_floor": floor}


def j_a_evidence(tau, a: float, j_max: int = 4096) -> JaReport:
    """Scan ``q_j`` densely for j <= j_max and along structured witnesses.

    Raises :class:`IrrationalRequired` for rational ``tau`` (the infimum is
    trivially zero there whenever ``tau`` is non-integral: multiples of the
    denominator give dist = 0).
    """
    if a <= 0:
        raise ValueError("the rate a must be positive")
    if isinstance(tau, (int, Fraction)) or (isinstance(tau, QuadSurd) and tau.is_rational):
        raise IrrationalRequired("q_j scans need an irrational tau")
    if j_max < 1:
        raise ValueError("j_max must be positive")

    tau_f = float(tau)
    minima: list[tuple[int, int, float]] = []
    best_ln = math.inf
    argmin = 1
    for j in range(1, j_max + 1):
        d = dist_to_integer(j, tau)
        mid = max(d.mid, 5e-324)
        ln_q = math.log(j) + a * j + math.log(mid)
        if ln_q < best_ln - 1e-12:
            best_ln = ln_q
            argmin = j
            minima.append((j, round(j * tau_f), math.exp(min(ln_q, 700.0))))

    # structured witnesses along the stream schedule, with certified brackets
    chain: list[_LogQ] = []
    chain_dicts: list[dict] = []
    if isinstance(tau, DyadicStream):
        a_frac = Fraction(a)
        for w in tau.witnesses():
            lq = _witness_logq(tau, w, a_frac)
            if lq is None:
                continue
            chain.append(lq)
            entry = {"index": w.index, "j_log2": w.j_log2}
            entry.update(_logq_summary(lq))
            chain_dicts.append(entry)
    descending = 0
    for prev, nxt in zip(chain, chain[1:]):
        if _certified_greater(prev, nxt):
            descending += 1
        else:
            break

    stable = j_max >= 16 and all(j <= j_max // 2 for j, _, _ in minima)
    below_dense = False
    if descending >= 1 and len(chain) >= 2:
        last = chain[descending]
        dense_log2 = Fraction(best_ln) * INV_LN2_HI if best_ln < 0 else Fraction(best_ln) * INV_LN2_LO
        if last.frac is not None:
            below_dense = last.frac[1] < dense_log2
        elif last.neg_floor is not None:
            below_dense = True

    if descending >= 1 and len(chain) >= 2 and below_dense:
        verdict = EVIDENCE_AGAINST
        detail = (
            f"certified strictly decreasing q along {descending + 1} structured "
            f"witnesses, ending below every densely scanned value"
        )
    elif stable:
        verdict = EVIDENCE_FOR
        detail = (
            f"running minimum q_j settled at j={argmin} and did not move in "
            f"the second half of the scan (j <= {j_max})"
        )
    else:
        verdict = UNKNOWN
        detail = "no certified decrease and the running minimum is still moving"

    return JaReport(
        a=float(a),
        j_max=j_max,
        q_min=math.exp(min(best_ln, 700.0)),
        ln_q_min=best_ln,
        argmin_j=argmin,
        minima=tuple(minima),
        witness_chain=tuple(chain_dicts),
        chain_descending=descending + 1 if descending else (1 if chain else 0),
        verdict=verdict,
        detail=detail,
    )
