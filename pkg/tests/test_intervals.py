import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from quasiarc.intervals import BoxC, Interval, _down, _up

finite = st.floats(min_value=-1e12, max_value=1e12,
                   allow_nan=False, allow_infinity=False)
nonzero = finite.filter(lambda x: abs(x) > 1e-12)


def test_directed_rounding_brackets():
    assert _down(1.0) < 1.0 < _up(1.0)
    assert _down(0.0) < 0.0 < _up(0.0)
    assert _down(-1.0) < -1.0 < _up(-1.0)


def test_exact_and_membership():
    iv = Interval.exact(0.5)
    assert iv.lo == iv.hi == 0.5
    assert iv.contains(0.5)


def test_from_fraction_tight_when_representable():
    iv = Interval.from_fraction(Fraction(3, 4))
    assert iv.lo == iv.hi == 0.75
    third = Interval.from_fraction(Fraction(1, 3))
    assert third.lo < 1 / 3 < third.hi or third.lo <= 1 / 3 <= third.hi
    assert third.width > 0


def test_ordering_predicates():
    assert Interval(1.0, 2.0).is_positive()
    assert Interval(-2.0, -1.0).is_negative()
    assert Interval(-1.0, 1.0).contains_zero()
    assert Interval(0.0, 1.0).strictly_less(Interval(1.5, 2.0))


@given(finite, finite, finite, finite)
def test_sum_containment(a, b, c, d):
    x, y = sorted((a, b)), sorted((c, d))
    iv = Interval(*x) + Interval(*y)
    assert iv.contains(x[0] + y[0])
    assert iv.contains(x[1] + y[1])


@given(finite, finite, finite, finite)
def test_product_containment(a, b, c, d):
    x, y = sorted((a, b)), sorted((c, d))
    iv = Interval(*x) * Interval(*y)
    for u in x:
        for v in y:
            assert iv.contains(u * v)


@given(finite, finite)
def test_abs_containment(a, b):
    lo, hi = sorted((a, b))
    iv = abs(Interval(lo, hi))
    assert iv.lo >= 0.0
    assert iv.contains(abs(lo)) and iv.contains(abs(hi))


@given(st.floats(min_value=1e-6, max_value=1e12))
def test_sqrt_log_exp_enclose_point_values(x):
    iv = Interval.exact(x)
    assert iv.sqrt().contains(math.sqrt(x))
    assert iv.log().contains(math.log(x))
    if x < 700:
        assert iv.exp().contains(math.exp(x))


@given(st.floats(min_value=-10.0, max_value=10.0))
def test_trig_enclose_point_values(x):
    iv = Interval.exact(x)
    assert iv.sin().contains(math.sin(x))
    assert iv.cos().contains(math.cos(x))


def test_division_by_zero_interval_raises():
    with pytest.raises((ZeroDivisionError, ArithmeticError)):
        Interval(1.0, 2.0) / Interval(-1.0, 1.0)


def test_box_arithmetic_contains_complex_product():
    z, w = 0.3 + 0.7j, -1.2 + 0.4j
    bz = BoxC(Interval.exact(z.real), Interval.exact(z.imag))
    bw = BoxC(Interval.exact(w.real), Interval.exact(w.imag))
    prod = bz * bw
    assert prod.re.contains((z * w).real)
    assert prod.im.contains((z * w).imag)
    assert abs(bz - bw).contains(abs(z - w))
