import cmath
import math
from fractions import Fraction

import pytest

from quasiarc.conditions import (
    AnglePositive,
    angle_profile,
    check_Q,
    check_t_monotonicity,
    check_W,
    diophantine_params,
    empirical_quasi,
    empirical_whitney_modulus,
    global_verdict,
)
from quasiarc.spectrum import hausdorff_dimension

_TWO_PI = 2.0 * math.pi


def _direct_corner_angle(fig, p):
    # independent of the profile code: angle at z_p between the incoming and
    # outgoing apex images
    q = fig.vertices[fig.q]
    zp = fig.vertices[p]
    incoming = fig.maps[p - 1](q) - zp
    outgoing = fig.maps[p](q) - zp
    return cmath.phase(incoming / outgoing) % _TWO_PI


def test_koch_corner_angles(koch):
    prof = angle_profile(koch)
    values = [a.value for a in prof.theta]
    assert values[0] == pytest.approx(math.pi / 3, abs=1e-10)
    assert values[1] == pytest.approx(4 * math.pi / 3, abs=1e-10)
    assert values[2] == pytest.approx(math.pi / 3, abs=1e-10)
    for p, angle in enumerate(values, start=1):
        assert angle == pytest.approx(_direct_corner_angle(koch, p), abs=1e-10)
    assert all(a.status == "positive" for a in prof.theta)


def test_koch_end_angles_vanish(koch):
    prof = angle_profile(koch)
    assert abs(prof.eta1.value) <= 1e-12
    assert abs(prof.eta2.value) <= 1e-12
    assert prof.eta1.status == "zero"
    assert prof.eta2.status == "zero"
    assert prof.xi > 0
    assert prof.regular


def test_koch_conditions_hold_analytically(koch):
    s = hausdorff_dimension(koch)
    for p in range(1, koch.ell):
        assert check_W(koch, p, s).status == "HoldsAnalytic"
        for t in (1.0, 2.0):
            assert check_Q(koch, p, t).status == "HoldsAnalytic"


def test_koch_global_verdict(koch):
    s = hausdorff_dimension(koch)
    verdicts = [check_W(koch, p, s) for p in range(1, koch.ell)]
    agg = global_verdict(koch, verdicts)
    assert agg.status == "HoldsAnalytic"
    assert len(agg.verdicts) == koch.ell - 1


def test_t_monotonicity_consistent_on_koch(koch):
    verdicts = [check_Q(koch, p, t) for p in range(1, koch.ell)
                for t in (1.0, 1.5, 2.0)]
    assert check_t_monotonicity(verdicts) == []


def test_omega_flat_corner_certified(omega):
    prof = angle_profile(omega.figure)
    statuses = [a.status for a in prof.theta]
    assert statuses == ["positive", "positive", "zero", "positive", "positive"]
    assert abs(prof.theta[2].value) <= 1e-12


def test_omega_rational_ratio_route(omega):
    fig = omega.figure
    s = hausdorff_dimension(fig)
    assert check_Q(fig, 3, 1.0).status == "HoldsRationalRatio"
    # the flat-corner scan sees the geometric decay but holds no certificate
    w = check_W(fig, 3, s)
    assert w.status == "EvidenceFor"
    assert w.log_constant is not None


def test_omega_diophantine_params(omega):
    fig = omega.figure
    dp = diophantine_params(fig, 3)
    assert dp.lam == pytest.approx(7 / 15, abs=1e-12)
    assert dp.mu == pytest.approx((7 / 15) ** (2000 / 2001), abs=1e-12)
    assert 0 < dp.lam < 1 and 0 < dp.mu < 1
    assert dp.x > 0 and dp.y > 0
    assert dp.x == pytest.approx(-math.log(7 / 15), abs=1e-12)
    assert dp.xy_rational
    assert dp.ratio_xy == Fraction(2001, 2000)
    with pytest.raises(AnglePositive):
        diophantine_params(fig, 1)


def test_omega_quasi_scan_stabilises(omega):
    sups = [empirical_quasi(omega.figure, 1.0, depth).sup_lower
            for depth in (3, 4)]
    assert sups[0] > 0
    assert abs(sups[1] - sups[0]) <= 0.1 * sups[0]


def test_segment_is_an_honest_quasi_arc(segment):
    scan = empirical_quasi(segment, 1.0, 8)
    assert scan.sup_lower == pytest.approx(1.0, abs=1e-12)


def test_segment_modulus_bins_do_not_decay(segment):
    table = empirical_whitney_modulus(segment, 1.0, 8)
    populated = [b for b in table.bins if b.pairs]
    assert populated
    for b in populated:
        assert b.sup_ratio == pytest.approx(1.0, abs=1e-9)


def test_scans_are_deterministic(omega):
    a = empirical_quasi(omega.figure, 1.0, 4, seed=0)
    b = empirical_quasi(omega.figure, 1.0, 4, seed=0)
    assert a.as_dict() == b.as_dict()
    c = empirical_quasi(omega.figure, 1.0, 4, seed=7)
    assert c.pairs > 0
