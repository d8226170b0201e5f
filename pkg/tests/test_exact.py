import math
from fractions import Fraction

import sympy as sp
from hypothesis import given, strategies as st

from quasiarc.exact import (PiMultiple, _abstract_deep_radicals, certified_arg,
                            exact_direction_between, interval_of_expr,
                            sym_is_zero, sym_sign)


def test_pi_multiple_arithmetic():
    a = PiMultiple.of(1, 3)
    b = PiMultiple.of(1, 6)
    assert float(a + b) == math.pi / 2
    assert (a - a).is_zero
    # angles live mod 2*pi, so negation wraps into [0, 2)
    assert (-a).frac == Fraction(5, 3)
    assert a.interval().contains(math.pi / 3)


def test_sym_is_zero_on_structural_zero():
    x = sp.sqrt(3)
    assert sym_is_zero(x * x - 3) is True
    assert sym_is_zero(sp.sin(sp.pi / 6) - sp.Rational(1, 2)) is True


def test_sym_is_zero_on_nonzero():
    assert sym_is_zero(sp.sqrt(2) - sp.Rational(7, 5)) is False


def test_sym_sign_basics():
    assert sym_sign(sp.Rational(3, 7)) == 1
    assert sym_sign(-sp.sqrt(5)) == -1
    assert sym_sign(sp.cos(sp.pi / 3) - sp.Rational(1, 2)) == 0


def test_deep_radical_abstraction_preserves_zero():
    # a structural zero built over a huge-denominator radical stays provable
    r = sp.Rational(7, 15) ** sp.Rational(2000, 2001)
    expr = sp.cos(r) ** 2 + sp.sin(r) ** 2 - 1
    probe, abstracted = _abstract_deep_radicals(expr)
    assert abstracted
    assert sp.simplify(probe) == 0
    assert sym_is_zero(expr) is True


def test_deep_radical_true_zero_never_reported_nonzero():
    # exponent relations the abstraction drops must degrade to None, not False
    r = sp.Rational(7, 15) ** sp.Rational(2000, 2001)
    expr = (1 + r) ** 2 - 1 - 2 * r - r**2
    assert sym_is_zero(expr) in (True, None)


def test_deep_radical_abstraction_keeps_power_relations():
    r = sp.Rational(7, 15) ** sp.Rational(2000, 2001)
    expr = r ** 2 - r * r
    assert sym_is_zero(sp.expand(expr)) is True


def test_deep_radical_nonzero_falls_back_to_numerics():
    r = sp.Rational(7, 15) ** sp.Rational(2000, 2001)
    assert sym_is_zero(r - sp.Rational(7, 15)) is False
    assert sym_sign(r - sp.Rational(7, 15)) == 1  # exponent < 1, base < 1


def test_quadratic_irrational_exponents_decided_quickly():
    e = sp.Rational(65537, 65536) - sp.sqrt(2) / 131072
    r = sp.Rational(7, 15) ** (1 / e)
    assert sym_is_zero(r - r) is True
    assert sym_sign(r) == 1


def test_interval_of_expr_encloses_numeric_value():
    expr = sp.sqrt(3) / 6 + sp.tan(sp.pi / 18) / 2
    iv = interval_of_expr(expr)
    val = float(sp.N(expr, 30))
    assert iv.contains(val)
    assert iv.width < 1e-12


@given(st.integers(min_value=-12, max_value=12), st.integers(min_value=1, max_value=12))
def test_certified_arg_on_rational_directions(p, q):
    ang = sp.pi * sp.Rational(p, q)
    vec = (sp.cos(ang), sp.sin(ang))
    got = certified_arg(vec[0], vec[1])
    assert got is not None
    # the certified argument is the same direction modulo 2*pi
    diff = float(got) - math.pi * p / q
    assert abs(math.remainder(diff, 2 * math.pi)) < 1e-12


def test_exact_direction_between_detects_equal_directions():
    a = (sp.sqrt(3), sp.Integer(1))
    b = (2 * sp.sqrt(3), sp.Integer(2))
    assert exact_direction_between(a, b) is True
    c = (sp.Integer(1), sp.sqrt(3))
    assert exact_direction_between(a, c) is False
