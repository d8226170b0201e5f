import cmath
import math

import pytest

from quasiarc.conditions import angle_profile
from quasiarc.geom import (
    InvalidFigureError,
    Similitude,
    build_basic_figure,
    validate_basic_figure,
)
from quasiarc.spectrum import hausdorff_dimension

from conftest import koch_vertices


def test_koch_figure_validates(koch):
    assert koch.report.ok
    assert koch.ell == 4
    assert koch.q == 2
    assert koch.vertices[0] == 0
    assert koch.vertices[-1] == 1
    for r in koch.ratios:
        assert r == pytest.approx(1 / 3, abs=1e-15)


def test_koch_maps_interpolate_vertices(koch):
    for j, s in enumerate(koch.maps):
        assert abs(s(0) - koch.vertices[j]) < 1e-15
        assert abs(s(1) - koch.vertices[j + 1]) < 1e-15


def test_overlapping_triangles_rejected():
    verts = [0, 0.4, 0.78 + 0.18j, 0.6, 1]
    report, fig = validate_basic_figure([complex(v) for v in verts], 2)
    assert fig is None
    assert "TriangleOverlap" in report.failed_clauses()


def test_non_contractive_map_rejected():
    verts = [0, 1 / 3, 1 / 2 + 5j, 2 / 3, 1]
    report, fig = validate_basic_figure([complex(v) for v in verts], 2)
    assert fig is None
    assert report.failed_clauses() == {"NonContractive"}


def test_apex_on_baseline_rejected():
    verts = [0, 1 / 3, 1 / 2, 2 / 3, 1]
    report, fig = validate_basic_figure([complex(v) for v in verts], 2)
    assert fig is None
    assert "VertexOutsidePi" in report.failed_clauses()


def test_build_raises_with_clause_report():
    with pytest.raises(InvalidFigureError) as exc:
        build_basic_figure([complex(0), complex(1 / 3), complex(1 / 2),
                            complex(2 / 3), complex(1)], 2)
    assert "VertexOutsidePi" in str(exc.value)
    assert not exc.value.report.ok


def test_apex_index_range_enforced():
    report, fig = validate_basic_figure(koch_vertices(), 4)
    assert fig is None
    assert "DegenerateFigure" in report.failed_clauses()


def test_similitude_apply_and_fixed_point():
    s = Similitude(0.5j, 1 + 0j)
    assert s(0) == 1 + 0j
    z = s.fixed_point()
    assert abs(s(z) - z) < 1e-15


def _angular_gap(a: float, b: float) -> float:
    return abs(cmath.exp(1j * a) - cmath.exp(1j * b))


def test_rigid_motion_leaves_figure_invariant():
    # the construction only sees the normalised figure, so a similarity of
    # the plane must not change any derived quantity
    w = 2 * cmath.exp(1j * math.pi / 7)
    base_fig = build_basic_figure(koch_vertices(), 2)
    moved = [w * v + 3 for v in koch_vertices()]
    fig = build_basic_figure(moved, 2)
    assert fig.report.ok
    base = angle_profile(base_fig)
    other = angle_profile(fig)
    for a, b in zip(base.theta, other.theta):
        assert _angular_gap(a.value, b.value) < 1e-10
        assert b.status == a.status
    for a, b in ((base.eta1, other.eta1), (base.eta2, other.eta2)):
        assert _angular_gap(a.value, b.value) < 1e-10
        assert b.status == a.status
    assert hausdorff_dimension(fig) == pytest.approx(
        hausdorff_dimension(base_fig), abs=1e-12)
