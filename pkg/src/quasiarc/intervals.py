"""Directed-rounding interval arithmetic over IEEE doubles.

Every numeric predicate in this package that claims rigor is decided on
intervals from this module: a predicate is *certified* only when the interval
excludes the decision boundary.  Results of elementary float operations are
widened outward by one ulp per endpoint; libm transcendentals (exp, log,
atan2, trig) are widened by two ulps, which is a comfortable cushion for the
sub-ulp accuracy of the platform libm.

The classes here are deliberately small: they cover exactly the operations
the geometry needs (field ops, abs, sqrt, log/exp, trig at narrow arguments,
arg of a complex box) and refuse to guess in the ambiguous cases (division by
a zero-straddling interval, arg of a box that meets the branch cut).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Union

_INF = math.inf

ScalarLike = Union[int, float, Fraction, "Interval"]


def _down(x: float) -> float:
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


def _down2(x: float) -> float:
    return math.nextafter(math.nextafter(x, -_INF), -_INF)


def _up2(x: float) -> float:
    return math.nextafter(math.nextafter(x, _INF), _INF)


class ArgUndecided(ArithmeticError):
    """The argument of a complex box could not be bracketed (box meets the
    origin or the negative-real branch cut)."""


class Interval:
    """A closed interval [lo, hi] of doubles with outward-rounded arithmetic."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo: float, hi: float | None = None):
        if hi is None:
            hi = lo
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError("NaN endpoint in interval")
        if lo > hi:
            raise ValueError(f"inverted interval [{lo}, {hi}]")
        self.lo = float(lo)
        self.hi = float(hi)

    # -- constructors ------------------------------------------------------

    @classmethod
    def exact(cls, x: float | int) -> "Interval":
        """Interval for a value that is exactly representable as a double."""
        return cls(float(x), float(x))

    @classmethod
    def from_fraction(cls, fr: Fraction) -> "Interval":
        f = float(fr)
        if Fraction(f) == fr:
            return cls(f, f)
        # float() rounds to nearest; one ulp outward brackets the true value
        return cls(_down(f), _up(f))

    @classmethod
    def of(cls, x: ScalarLike) -> "Interval":
        if isinstance(x, Interval):
            return x
        if isinstance(x, Fraction):
            return cls.from_fraction(x)
        if isinstance(x, int) and abs(x) > 2**53:
            return cls.from_fraction(Fraction(x))
        return cls.exact(float(x))

    @classmethod
    def hull(cls, values: Iterable[ScalarLike]) -> "Interval":
        ivs = [cls.of(v) for v in values]
        if not ivs:
            raise ValueError("hull of empty set")
        return cls(min(iv.lo for iv in ivs), max(iv.hi for iv in ivs))

    # -- queries -----------------------------------------------------------

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def rad(self) -> float:
        m = self.mid
        return max(self.hi - m, m - self.lo)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def mag(self) -> float:
        """max |x| over the interval."""
        return max(abs(self.lo), abs(self.hi))

    def mig(self) -> float:
        """min |x| over the interval."""
        if self.lo <= 0.0 <= self.hi:
            return 0.0
        return min(abs(self.lo), abs(self.hi))

    def contains(self, v: float) -> bool:
        return self.lo <= v <= self.hi

    def contains_zero(self) -> bool:
        return self.lo <= 0.0 <= self.hi

    def is_positive(self) -> bool:
        """Certified strictly positive."""
        return self.lo > 0.0

    def is_negative(self) -> bool:
        return self.hi < 0.0

    def strictly_less(self, other: "Interval") -> bool:
        return self.hi < other.lo

    def __repr__(self) -> str:
        return f"Interval({self.lo!r}, {self.hi!r})"

    # -- arithmetic --------------------------------------------------------

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __add__(self, other: ScalarLike) -> "Interval":
        o = Interval.of(other)
        return Interval(_down(self.lo + o.lo), _up(self.hi + o.hi))

    __radd__ = __add__

    def __sub__(self, other: ScalarLike) -> "Interval":
        return self + (-Interval.of(other))

    def __rsub__(self, other: ScalarLike) -> "Interval":
        return Interval.of(other) + (-self)

    def __mul__(self, other: ScalarLike) -> "Interval":
        o = Interval.of(other)
        products = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(_down(min(products)), _up(max(products)))

    __rmul__ = __mul__

    def __truediv__(self, other: ScalarLike) -> "Interval":
        o = Interval.of(other)
        if o.contains_zero():
            raise ZeroDivisionError("division by interval containing zero")
        quotients = (self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi)
        return Interval(_down(min(quotients)), _up(max(quotients)))

    def __rtruediv__(self, other: ScalarLike) -> "Interval":
        return Interval.of(other) / self

    def __abs__(self) -> "Interval":
        if self.lo >= 0.0:
            return Interval(self.lo, self.hi)
        if self.hi <= 0.0:
            return -self
        return Interval(0.0, max(-self.lo, self.hi))

    def sqrt(self) -> "Interval":
        if self.hi < 0.0:
            raise ValueError("sqrt of negative interval")
        lo = max(0.0, self.lo)
        return Interval(max(0.0, _down(math.sqrt(lo))), _up(math.sqrt(self.hi)))

    def log(self) -> "Interval":
        if self.lo <= 0.0:
            raise ValueError("log of non-positive interval")
        return Interval(_down2(math.log(self.lo)), _up2(math.log(self.hi)))

    def exp(self) -> "Interval":
        return Interval(max(0.0, _down2(math.exp(self.lo))), _up2(math.exp(self.hi)))

    def power(self, e: "Interval | float | Fraction") -> "Interval":
        """self**e for a strictly positive base, via exp(e*log(base))."""
        return (self.log() * Interval.of(e)).exp()

    def sin(self) -> "Interval":
        return _trig(self, math.sin, offset=0.0)

    def cos(self) -> "Interval":
        return _trig(self, math.cos, offset=0.5 * math.pi)

    def tan(self) -> "Interval":
        # Derivative of tan never vanishes, so endpoint values bracket the
        # range provided no pole lies inside.
        k_lo = math.floor(self.lo / math.pi - 0.5)
        k_hi = math.floor(self.hi / math.pi - 0.5)
        if k_lo != k_hi or self.width > 1.0:
            raise ValueError("tan over interval containing a pole")
        return Interval(_down2(math.tan(self.lo)), _up2(math.tan(self.hi)))


def _trig(iv: Interval, fn, offset: float) -> Interval:
    """Shared sin/cos range bracketing; `offset` shifts extremum locations.

    Extrema of sin sit at pi/2 + k*pi, of cos at k*pi; we conservatively
    include +-1 whenever a candidate extremum may fall inside the interval.
    """
    if iv.width >= math.pi:
        return Interval(-1.0, 1.0)
    vals = [_down2(fn(iv.lo)), _up2(fn(iv.lo)), _down2(fn(iv.hi)), _up2(fn(iv.hi))]
    lo, hi = min(vals), max(vals)
    # extrema of fn at offset/... : sin'=0 at pi/2+k pi ; cos'=0 at k pi
    k0 = math.floor((iv.lo - offset - 0.5 * math.pi) / math.pi)
    for k in (k0, k0 + 1, k0 + 2):
        x = offset + 0.5 * math.pi + k * math.pi
        # widen the crossing test by an ulp to stay conservative
        if _down(iv.lo) <= x <= _up(iv.hi):
            v = fn(x)
            if v > 0:
                hi = 1.0
            else:
                lo = -1.0
    return Interval(max(-1.0, lo), min(1.0, hi))


# pi as an interval: math.pi underestimates the true value
PI = Interval(math.pi, _up(math.pi))
TWO_PI = PI * 2
LOG2 = Interval(_down2(math.log(2.0)), _up2(math.log(2.0)))


class BoxC:
    """Axis-aligned rectangular enclosure of a complex number."""

    __slots__ = ("re", "im")

    def __init__(self, re: ScalarLike, im: ScalarLike):
        self.re = Interval.of(re)
        self.im = Interval.of(im)

    @classmethod
    def exact(cls, z: complex) -> "BoxC":
        return cls(Interval.exact(z.real), Interval.exact(z.imag))

    @property
    def mid(self) -> complex:
        return complex(self.re.mid, self.im.mid)

    def __repr__(self) -> str:
        return f"BoxC({self.re!r}, {self.im!r})"

    def __add__(self, other: "BoxC") -> "BoxC":
        return BoxC(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "BoxC") -> "BoxC":
        return BoxC(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "BoxC":
        return BoxC(-self.re, -self.im)

    def __mul__(self, other: "BoxC | ScalarLike") -> "BoxC":
        if not isinstance(other, BoxC):
            s = Interval.of(other)
            return BoxC(self.re * s, self.im * s)
        return BoxC(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def conj(self) -> "BoxC":
        return BoxC(self.re, -self.im)

    def abs2(self) -> Interval:
        return self.re * self.re + self.im * self.im

    def __abs__(self) -> Interval:
        return self.abs2().sqrt()

    def __truediv__(self, other: "BoxC") -> "BoxC":
        d = other.abs2()
        num = self * other.conj()
        return BoxC(num.re / d, num.im / d)

    def contains_zero(self) -> bool:
        return self.re.contains_zero() and self.im.contains_zero()

    def arg(self) -> Interval:
        """Bracket arg(z) over the box, principal branch (-pi, pi].

        Raises ArgUndecided when the box meets the origin or crosses the
        negative real axis, where the principal argument is discontinuous.
        """
        if self.contains_zero():
            raise ArgUndecided("box contains the origin")
        if self.re.lo < 0.0 and self.im.contains_zero():
            raise ArgUndecided("box meets the branch cut")
        corners = [
            math.atan2(y, x)
            for y in (self.im.lo, self.im.hi)
            for x in (self.re.lo, self.re.hi)
        ]
        return Interval(_down2(min(corners)), _up2(max(corners)))


def arg_mod_2pi(box: BoxC) -> Interval:
    """Bracket arg(z) as a value in [0, 2*pi).

    Only defined when the box stays clear of the positive real axis or lies
    entirely in the closed upper/lower half plane; otherwise the wrapped
    image would be disconnected and we raise ArgUndecided.
    """
    a = box.arg()
    if a.lo >= 0.0:
        return a
    if a.hi <= 0.0:
        return a + TWO_PI
    raise ArgUndecided("argument straddles the positive real axis")
