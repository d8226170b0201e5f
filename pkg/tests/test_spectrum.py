import dataclasses
import math

import numpy as np
import pytest

from quasiarc.spectrum import (
    DepthExceedsWeights,
    InsufficientMiddleMaps,
    PreconditionForget,
    cell_measures,
    check_forget,
    check_lemma32_iii,
    cylinder_measure,
    epsilon_sequence,
    f_vertices,
    hausdorff_dimension,
    iterate_system,
    natural_weights,
    whitney_cell_measures,
    whitney_f_vertex,
    whitney_measure_cylinder,
    whitney_weights,
)


@pytest.fixture(scope="module")
def koch16_eps(koch16):
    return epsilon_sequence(koch16, 4)


@pytest.fixture(scope="module")
def koch16_weights(koch16, koch16_eps):
    return whitney_weights(koch16, 1.1, koch16_eps, 4)


def test_koch_dimension_matches_log_oracle(koch):
    s = hausdorff_dimension(koch)
    assert s == pytest.approx(math.log(4) / math.log(3), abs=1e-10)
    assert abs(math.fsum(r**s for r in koch.ratios) - 1.0) <= 1e-12


def test_omega_dimension_oracle(omega):
    # frozen from an independent high-precision root find on the same ratios
    assert hausdorff_dimension(omega) == pytest.approx(1.1613944488108245,
                                                       abs=2e-12)


def test_segment_dimension_is_one(segment):
    assert hausdorff_dimension(segment) == pytest.approx(1.0, abs=1e-12)


def test_cylinder_measure_is_weight_product(koch):
    w = natural_weights(koch)
    word = (2, 1, 4, 3)
    expect = w[1] * w[0] * w[3] * w[2]
    assert cylinder_measure(koch, word) == pytest.approx(expect, rel=1e-15)
    assert cylinder_measure(koch, ()) == 1.0


@pytest.mark.parametrize("name", ["koch", "omega"])
def test_cell_measures_additive(name, request):
    fig = request.getfixturevalue(name)
    children = None
    for depth in range(5, 0, -1):
        meas = cell_measures(fig, depth)
        assert meas.min() > 0
        if children is not None:
            ell = len(children) // len(meas)
            regrouped = children.reshape(len(meas), ell).sum(axis=1)
            assert np.max(np.abs(regrouped - meas)) <= 1e-12
        children = meas
    assert abs(children.sum() - 1.0) <= 1e-11


@pytest.mark.parametrize("name", ["koch", "omega"])
def test_f_vertices_strictly_increasing(name, request):
    fig = request.getfixturevalue(name)
    f = f_vertices(fig, 6)
    assert f[0] == 0.0
    assert f[-1] == 1.0
    assert np.all(np.diff(f) > 0)


def test_forget_fails_on_plain_koch(koch):
    holds, margin = check_forget(koch, 1.1)
    assert not holds
    assert margin < 0


def test_forget_holds_on_iterated_koch(koch16):
    holds, margin = check_forget(koch16, 1.1)
    assert holds
    assert margin > 0


def test_epsilon_sequence_positive_decreasing(koch16_eps):
    assert all(e > 0 for e in koch16_eps)
    assert all(a >= b for a, b in zip(koch16_eps, koch16_eps[1:]))


def test_epsilon_sequence_needs_middle_maps(segment):
    with pytest.raises(InsufficientMiddleMaps):
        epsilon_sequence(segment, 2)


def test_whitney_weights_level_invariants(koch16, koch16_weights):
    ww = koch16_weights
    assert ww.K == 4
    # the middle letters alone fill the unit mass at the limiting exponent
    assert ww.s_prime == pytest.approx(math.log(14) / math.log(9), abs=1e-12)
    assert ww.gamma > 0
    r1s = ww.ratios[0] ** ww.s
    rls = ww.ratios[-1] ** ww.s
    for k in range(1, ww.K + 1):
        row = ww.level_weights[k - 1]
        assert abs(math.fsum(row) - 1.0) <= 1e-12
        tk = ww.tau[k - 1]
        assert row[0] == tk and row[-1] == tk
        assert tk <= r1s and tk <= rls
        assert tk <= ww.eps[k - 1] ** ww.s_tilde
        sk = ww.s_levels[k - 1]
        assert ww.s_prime < sk <= ww.s_prime + ww.gamma / k**2 + 1e-10
    assert all(a > b for a, b in zip(ww.s_levels, ww.s_levels[1:]))


def test_whitney_weights_require_forget(koch, koch16, koch16_eps):
    with pytest.raises(PreconditionForget):
        whitney_weights(koch, 1.1, (0.01, 0.01), 2)
    with pytest.raises(ValueError):
        whitney_weights(koch16, 1.1, koch16_eps[:2], 4)


def test_whitney_cylinder_product_and_depth_guard(koch16, koch16_weights):
    ww = koch16_weights
    word = (3, 7, 16)
    expect = (ww.level_weights[0][2] * ww.level_weights[1][6]
              * ww.level_weights[2][15])
    assert whitney_measure_cylinder(word, ww) == pytest.approx(expect, rel=1e-15)
    with pytest.raises(DepthExceedsWeights):
        whitney_measure_cylinder((1,) * 5, ww)
    with pytest.raises(DepthExceedsWeights):
        whitney_cell_measures(koch16, ww, 5)


def test_whitney_f_monotone_normalised(koch16, koch16_weights):
    meas = whitney_cell_measures(koch16, koch16_weights, 3)
    assert meas.min() > 0
    assert whitney_f_vertex(koch16, koch16_weights, len(meas), 3) == 1.0
    mid = whitney_f_vertex(koch16, koch16_weights, len(meas) // 2, 3)
    assert 0 < mid < 1


def test_prefix_ratio_bound_holds(koch16_weights):
    assert check_lemma32_iii(koch16_weights, 3, 3) <= 1.0


def test_prefix_ratio_bound_flags_perturbation(koch16_weights):
    rows = list(koch16_weights.level_weights)
    row = list(rows[0])
    row[5] *= 1.8
    rows[0] = tuple(row)
    bad = dataclasses.replace(koch16_weights, level_weights=tuple(rows))
    assert check_lemma32_iii(bad, 3, 3) > 1.0
