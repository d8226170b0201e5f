"""Planar similitudes and basic figures for self-similar arcs.

A *basic figure* is a polygonal template: vertices ``v_0 .. v_l`` with the
first/last vertex spanning a unit baseline, a distinguished apex ``v_q``
above it, and one orientation-preserving contracting similitude per edge
sending the baseline onto that edge.  The attractor of the induced iterated
function system is the self-similar curve the rest of the package studies.

Validation is certified: every geometric clause is decided over directed
intervals, with an exact symbolic escalation for genuine boundary ties
(adjacent image triangles touching at a shared vertex, an apex image landing
exactly on a triangle side, collinear contact rays).  A figure is returned
only when every clause certifies as satisfied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

import sympy as sp

from .exact import PiMultiple, certified_arg, sym_is_zero, sym_sign
from .intervals import BoxC, Interval

__all__ = [
    "Similitude",
    "similitude_between",
    "ClauseCheck",
    "ValidationReport",
    "InvalidFigureError",
    "BasicFigure",
    "LogRatioStructure",
    "build_basic_figure",
    "validate_basic_figure",
]


@dataclass(frozen=True)
class Similitude:
    """Orientation-preserving planar similitude z -> a*z + b."""

    a: complex
    b: complex

    @property
    def ratio(self) -> float:
        return abs(self.a)

    def __call__(self, z: complex) -> complex:
        return self.a * z + self.b

    def compose(self, other: "Similitude") -> "Similitude":
        """self o other."""
        return Similitude(self.a * other.a, self.a * other.b + self.b)

    def fixed_point(self) -> complex:
        if self.a == 1:
            raise ValueError("translation or identity has no unique fixed point")
        return self.b / (1 - self.a)

    def apply_array(self, zs):
        return self.a * zs + self.b


def similitude_between(src: tuple[complex, complex], dst: tuple[complex, complex]) -> Similitude:
    """The unique orientation-preserving similitude with src[i] -> dst[i]."""
    s0, s1 = src
    d0, d1 = dst
    if s0 == s1:
        raise ValueError("degenerate source segment")
    a = (d1 - d0) / (s1 - s0)
    return Similitude(a, d0 - a * s0)


@dataclass(frozen=True)
class SimilitudeSystem:
    """A bare iterated function system of planar similitudes.

    The arc/measure machinery accepts these directly, so systems that are not
    basic figures (a subdivided segment, synthetic sign patterns) can still be
    parametrised, measured and sampled.  ``signs[j] = -1`` marks a map whose
    copy of the attractor is traversed against the arc orientation.
    """

    maps: tuple[Similitude, ...]
    signs: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))
        if self.signs is not None:
            object.__setattr__(self, "signs", tuple(self.signs))
            if len(self.signs) != len(self.maps):
                raise ValueError("one sign per map required")

    @property
    def ell(self) -> int:
        return len(self.maps)

    @property
    def ratios(self) -> tuple[float, ...]:
        return tuple(m.ratio for m in self.maps)

    @property
    def max_ratio(self) -> float:
        return max(self.ratios)


# ---------------------------------------------------------------------------
# validation report plumbing
# ---------------------------------------------------------------------------

PASS = "pass"
FAIL = "fail"
UNRESOLVED = "unresolved"

# canonical clause identifiers surfaced in reports
NOT_ON_BASELINE = "NotOnBaseline"
VERTEX_OUTSIDE_PI = "VertexOutsidePi"
TRIANGLE_OVERLAP = "TriangleOverlap"
APEX_IMAGE_OUTSIDE = "ApexImageOutside"
SIDE_TOUCH_VIOLATION = "SideTouchViolation"
NON_CONTRACTIVE = "NonContractive"
DEGENERATE = "DegenerateFigure"


@dataclass
class ClauseCheck:
    clause: str
    status: str
    detail: str = ""
    margin: float | None = None
    indices: tuple[int, ...] = ()

    def as_dict(self) -> dict:
        return {
            "clause": self.clause,
            "status": self.status,
            "detail": self.detail,
            "margin": self.margin,
            "indices": list(self.indices),
        }


@dataclass
class ValidationReport:
    checks: list[ClauseCheck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.status == PASS for c in self.checks)

    @property
    def failures(self) -> list[ClauseCheck]:
        return [c for c in self.checks if c.status != PASS]

    def failed_clauses(self) -> set[str]:
        return {c.clause for c in self.failures}

    def add(self, clause: str, status: str, detail: str = "",
            margin: float | None = None, indices: tuple[int, ...] = ()) -> None:
        self.checks.append(ClauseCheck(clause, status, detail, margin, indices))

    def as_dict(self) -> dict:
        return {"ok": self.ok, "checks": [c.as_dict() for c in self.checks]}


class InvalidFigureError(ValueError):
    def __init__(self, report: ValidationReport):
        self.report = report
        lines = "; ".join(f"{c.clause}[{','.join(map(str, c.indices))}]: {c.detail}"
                          for c in report.failures)
        super().__init__(f"basic figure validation failed: {lines}")


@dataclass(frozen=True)
class LogRatioStructure:
    """Declared structure r = base**exponent for the two end contraction ratios.

    `base` is a rational in (0,1); the exponents are exact scalars (Fraction,
    or an object exposing ``is_rational``/``interval()`` such as a quadratic
    surd or a dyadic-stream value).  From this the logarithmic parameters of
    every degenerate corner are exactly known up to the common factor
    log(1/base).
    """

    base: Fraction
    exponent_first: Any  # mu = base**exponent_first  (first-edge ratio)
    exponent_last: Any   # lam = base**exponent_last  (last-edge ratio)


# ---------------------------------------------------------------------------
# the figure object
# ---------------------------------------------------------------------------


class BasicFigure:
    """A validated basic figure (normalised so v_0 = 0, v_l = 1).

    Exposes the float track (vertices, maps) for bulk computation, the
    interval track (vertex boxes, map parameter boxes) for certified
    predicates, and optional exact data (sympy coordinates, certified edge
    directions, declared ratio structure) for boundary-exact decisions.
    """

    def __init__(self, vertices: Sequence[complex], q: int, *,
                 boxes: Sequence[BoxC],
                 sym_vertices: Sequence[tuple[sp.Expr, sp.Expr]] | None = None,
                 sym_env: dict | None = None,
                 edge_args: Sequence[PiMultiple | None] | None = None,
                 apex_arg: PiMultiple | None = None,
                 apex_less_one_arg: PiMultiple | None = None,
                 log_ratio: LogRatioStructure | None = None,
                 family: Any = None,
                 name: str = "",
                 report: ValidationReport | None = None):
        self.vertices = tuple(complex(v) for v in vertices)
        self.q = int(q)
        self.boxes = tuple(boxes)
        self.sym_vertices = tuple(sym_vertices) if sym_vertices is not None else None
        self.sym_env = dict(sym_env or {})
        ell = len(self.vertices) - 1
        self.edge_args = tuple(edge_args) if edge_args is not None else (None,) * ell
        self.apex_arg = apex_arg
        self.apex_less_one_arg = apex_less_one_arg
        self.log_ratio = log_ratio
        self.family = family
        self.name = name or "figure"
        self.report = report or ValidationReport()

    # -- basic structure ---------------------------------------------------

    @property
    def ell(self) -> int:
        return len(self.vertices) - 1

    @property
    def apex(self) -> complex:
        return self.vertices[self.q]

    @property
    def maps(self) -> tuple[Similitude, ...]:
        return tuple(
            Similitude(self.vertices[j] - self.vertices[j - 1], self.vertices[j - 1])
            for j in range(1, self.ell + 1)
        )

    @property
    def ratios(self) -> tuple[float, ...]:
        return tuple(m.ratio for m in self.maps)

    @property
    def max_ratio(self) -> float:
        return max(self.ratios)

    def ratio_intervals(self) -> tuple[Interval, ...]:
        out = []
        for j in range(1, self.ell + 1):
            out.append(abs(self.boxes[j] - self.boxes[j - 1]))
        return tuple(out)

    def map_boxes(self) -> tuple[tuple[BoxC, BoxC], ...]:
        """Interval enclosures of (a_j, b_j) for each map."""
        return tuple(
            (self.boxes[j] - self.boxes[j - 1], self.boxes[j - 1])
            for j in range(1, self.ell + 1)
        )

    def apex_image_box(self, j: int) -> BoxC:
        """Interval enclosure of S_j(v_q), 1-based j."""
        a, b = self.map_boxes()[j - 1]
        return a * self.boxes[self.q] + b

    def sym_edge(self, j: int) -> tuple[sp.Expr, sp.Expr] | None:
        if self.sym_vertices is None:
            return None
        (xa, ya), (xb, yb) = self.sym_vertices[j - 1], self.sym_vertices[j]
        return (sp.expand(xb - xa), sp.expand(yb - ya))

    def sym_apex_image(self, j: int) -> tuple[sp.Expr, sp.Expr] | None:
        """Exact coordinates of S_j(v_q)."""
        if self.sym_vertices is None:
            return None
        ex, ey = self.sym_edge(j)
        qx, qy = self.sym_vertices[self.q]
        bx, by = self.sym_vertices[j - 1]
        return (sp.expand(ex * qx - ey * qy + bx), sp.expand(ex * qy + ey * qx + by))

    def diameter_upper(self, depth: int = 5) -> float:
        """Rigorous upper bound for the diameter of the attractor."""
        from .arc import attractor_diameter_upper  # local import; arc builds on geom

        return attractor_diameter_upper(self, depth)

    def __repr__(self) -> str:
        return f"BasicFigure({self.name!r}, ell={self.ell}, q={self.q})"


# ---------------------------------------------------------------------------
# certified convex separation
# ---------------------------------------------------------------------------


def _proj_interval(axis: tuple[Interval, Interval], pts: Sequence[BoxC]) -> list[Interval]:
    ax, ay = axis
    return [p.re * ax + p.im * ay for p in pts]


def _axis_candidates(pts_a: Sequence[BoxC], pts_b: Sequence[BoxC]):
    """Candidate separating axes: edge normals of both hulls plus all
    vertex-difference directions (complete for convex polytopes)."""
    axes = []

    def edge_normals(pts):
        n = len(pts)
        if n < 2:
            return
        for i in range(n):
            p, r = pts[i], pts[(i + 1) % n]
            if n == 2 and i == 1:
                break
            dx, dy = r.re - p.re, r.im - p.im
            axes.append((-dy, dx, ("edge", pts is pts_a, i)))

    edge_normals(pts_a)
    edge_normals(pts_b)
    for i, p in enumerate(pts_a):
        for j, r in enumerate(pts_b):
            axes.append((r.re - p.re, r.im - p.im, ("pair", i, j)))
    return axes


def certified_separation(pts_a: Sequence[BoxC], pts_b: Sequence[BoxC], *,
                         open_sets: bool,
                         exact_a: Sequence[tuple[sp.Expr, sp.Expr]] | None = None,
                         exact_b: Sequence[tuple[sp.Expr, sp.Expr]] | None = None,
                         env: dict | None = None) -> tuple[str, float]:
    """Decide disjointness of two convex hulls given interval vertices.

    For ``open_sets`` the question is interior-disjointness (weak separation
    along some axis suffices); otherwise genuine strict separation is
    required.  Returns (status, margin): status in {pass, fail, unresolved}.
    The exact coordinates, when provided, resolve boundary ties.
    """
    best_gap = -math.inf
    tie_axes = []
    for ax, ay, tag in _axis_candidates(pts_a, pts_b):
        mag2 = ax * ax + ay * ay
        if not mag2.is_positive():
            continue
        norm = mag2.sqrt()
        pa = _proj_interval((ax, ay), pts_a)
        pb = _proj_interval((ax, ay), pts_b)
        max_a = Interval(max(p.lo for p in pa), max(p.hi for p in pa))
        min_b = Interval(min(p.lo for p in pb), min(p.hi for p in pb))
        max_b = Interval(max(p.lo for p in pb), max(p.hi for p in pb))
        min_a = Interval(min(p.lo for p in pa), min(p.hi for p in pa))
        for gap, flip in ((min_b - max_a, False), (min_a - max_b, True)):
            g = gap / norm
            if g.lo > 0.0:
                return PASS, g.lo
            best_gap = max(best_gap, g.lo)
            if g.hi >= 0.0:
                tie_axes.append(((ax, ay), flip, tag))

    if open_sets and tie_axes and exact_a is not None and exact_b is not None:
        for (ax, ay), flip, _tag in tie_axes:
            a_pts, b_pts = (exact_b, exact_a) if flip else (exact_a, exact_b)
            axis = _exact_axis((ax, ay), exact_a, exact_b, _tag)
            if axis is None:
                continue
            if _exact_weak_separation(axis, a_pts, b_pts, env):
                return PASS, 0.0
    # try to certify an actual overlap
    if _certified_overlap(pts_a, pts_b, open_sets, exact_a, exact_b, env):
        return FAIL, best_gap
    return UNRESOLVED, best_gap


def _exact_axis(axis_iv, exact_a, exact_b, tag):
    """Rebuild the tie axis as an exact vector from its provenance tag."""
    kind = tag[0]
    if kind == "edge":
        _, is_a, i = tag
        pts = exact_a if is_a else exact_b
        n = len(pts)
        p, r = pts[i], pts[(i + 1) % n]
        return (-(sp.expand(r[1] - p[1])), sp.expand(r[0] - p[0]))
    _, i, j = tag
    p, r = exact_a[i], exact_b[j]
    return (sp.expand(r[0] - p[0]), sp.expand(r[1] - p[1]))


def _exact_weak_separation(axis, lower_pts, upper_pts, env) -> bool:
    """Certify proj(a) <= proj(b) exactly for all a in lower, b in upper."""
    ax, ay = axis
    lows = [sp.expand(ax * x + ay * y) for x, y in lower_pts]
    ups = [sp.expand(ax * x + ay * y) for x, y in upper_pts]
    for pa in lows:
        for pb in ups:
            s = sym_sign(sp.expand(pb - pa), env)
            if s is None or s < 0:
                return False
    return True


def _certified_overlap(pts_a, pts_b, open_sets, exact_a, exact_b, env) -> bool:
    """Prove that the hulls genuinely intersect (not merely touch, when the
    question is about interiors)."""
    strict = open_sets

    def inside(pt_box, hull, pt_exact, hull_exact):
        n = len(hull)
        if n < 3:
            return False
        for i in range(n):
            p, r = hull[i], hull[(i + 1) % n]
            cross = (r.re - p.re) * (pt_box.im - p.im) - (r.im - p.im) * (pt_box.re - p.re)
            if strict:
                if not cross.is_positive():
                    if pt_exact is None or hull_exact is None:
                        return False
                    pe = hull_exact[i]
                    re_ = hull_exact[(i + 1) % n]
                    c = sp.expand((re_[0] - pe[0]) * (pt_exact[1] - pe[1])
                                  - (re_[1] - pe[1]) * (pt_exact[0] - pe[0]))
                    if sym_sign(c, env) != 1:
                        return False
            else:
                if cross.is_negative():
                    return False
                if cross.contains_zero():
                    if pt_exact is None or hull_exact is None:
                        return False
                    pe = hull_exact[i]
                    re_ = hull_exact[(i + 1) % n]
                    c = sp.expand((re_[0] - pe[0]) * (pt_exact[1] - pe[1])
                                  - (re_[1] - pe[1]) * (pt_exact[0] - pe[0]))
                    s = sym_sign(c, env)
                    if s is None or s < 0:
                        return False
        return True

    # an assumed-ccw hull test both ways round guards against ordering quirks
    def inside_any_orientation(pt, hull, pt_e, hull_e):
        rev_e = None if hull_e is None else list(reversed(hull_e))
        return inside(pt, hull, pt_e, hull_e) or inside(pt, list(reversed(hull)), pt_e, rev_e)

    for i, p in enumerate(pts_a):
        if inside_any_orientation(p, pts_b, None if exact_a is None else exact_a[i], exact_b):
            return True
    for j, r in enumerate(pts_b):
        if inside_any_orientation(r, pts_a, None if exact_b is None else exact_b[j], exact_a):
            return True
    # proper edge crossings
    def edges(pts):
        n = len(pts)
        if n == 2:
            return [(pts[0], pts[1])]
        return [(pts[i], pts[(i + 1) % n]) for i in range(n)]

    def orient(p, q, r):
        return (q.re - p.re) * (r.im - p.im) - (q.im - p.im) * (r.re - p.re)

    for p1, p2 in edges(pts_a):
        for q1, q2 in edges(pts_b):
            d1 = orient(p1, p2, q1)
            d2 = orient(p1, p2, q2)
            d3 = orient(q1, q2, p1)
            d4 = orient(q1, q2, p2)
            if (((d1.is_positive() and d2.is_negative()) or (d1.is_negative() and d2.is_positive()))
                    and ((d3.is_positive() and d4.is_negative()) or (d3.is_negative() and d4.is_positive()))):
                return True
    # exact touch of a vertex on the other hull's boundary counts for closed sets
    if not open_sets and exact_a is not None and exact_b is not None:
        for pt in exact_a:
            if _exact_point_on_hull_boundary(pt, exact_b, env):
                return True
        for pt in exact_b:
            if _exact_point_on_hull_boundary(pt, exact_a, env):
                return True
    return False


def _exact_point_on_hull_boundary(pt, hull_exact, env) -> bool:
    n = len(hull_exact)
    segs = [(hull_exact[i], hull_exact[(i + 1) % n]) for i in range(n)] if n > 2 \
        else [(hull_exact[0], hull_exact[1])]
    for a, b in segs:
        cross = sp.expand((b[0] - a[0]) * (pt[1] - a[1]) - (b[1] - a[1]) * (pt[0] - a[0]))
        if sym_is_zero(cross) is not True:
            continue
        dot = sp.expand((pt[0] - a[0]) * (b[0] - a[0]) + (pt[1] - a[1]) * (b[1] - a[1]))
        len2 = sp.expand((b[0] - a[0]) ** 2 + (b[1] - a[1]) ** 2)
        s0 = sym_sign(dot, env)
        s1 = sym_sign(sp.expand(len2 - dot), env)
        if s0 is not None and s0 >= 0 and s1 is not None and s1 >= 0:
            return True
    return False


# ---------------------------------------------------------------------------
# construction + validation
# ---------------------------------------------------------------------------


def _sign_of(iv: Interval, exact_expr: sp.Expr | None, env) -> int | None:
    """Three-way sign from the interval, escalating to exact on a tie."""
    if iv.is_positive():
        return 1
    if iv.is_negative():
        return -1
    if exact_expr is not None:
        return sym_sign(exact_expr, env)
    if iv.lo == iv.hi == 0.0:
        return 0
    return None


def _normalise(vertices, sym_vertices, env):
    """Send v0 -> 0, v_last -> 1 by the unique orientation-preserving
    similitude; exact coordinates are transformed exactly."""
    v0, vl = vertices[0], vertices[-1]
    span = vl - v0
    if span == 0:
        raise ValueError("baseline endpoints coincide")
    if v0 == 0 and vl == 1:
        norm_float = [complex(v) for v in vertices]
        boxes = [BoxC.exact(v) for v in vertices]
    else:
        norm_float = [complex((v - v0) / span) for v in vertices]
        boxes = []
        span_box = BoxC.exact(vl) - BoxC.exact(v0)
        for v in vertices:
            boxes.append((BoxC.exact(v) - BoxC.exact(v0)) / span_box)
    norm_sym = None
    if sym_vertices is not None:
        x0, y0 = sym_vertices[0]
        xl, yl = sym_vertices[-1]
        if x0 == 0 and y0 == 0 and xl == 1 and yl == 0:
            # already normalised; simplify would needlessly churn on any
            # algebraic-power coordinates
            norm_sym = [(sp.sympify(x), sp.sympify(y)) for x, y in sym_vertices]
            boxes = []
            from .exact import interval_of_expr

            for nx, ny in norm_sym:
                boxes.append(BoxC(interval_of_expr(nx, env), interval_of_expr(ny, env)))
            norm_float = [complex(b.re.mid, b.im.mid) for b in boxes]
            return norm_float, norm_sym, boxes
        dx, dy = sp.expand(xl - x0), sp.expand(yl - y0)
        den = sp.expand(dx * dx + dy * dy)
        norm_sym = []
        for x, y in sym_vertices:
            rx, ry = sp.expand(x - x0), sp.expand(y - y0)
            nx = sp.simplify(sp.expand(rx * dx + ry * dy) / den)
            ny = sp.simplify(sp.expand(ry * dx - rx * dy) / den)
            norm_sym.append((nx, ny))
        boxes = []
        from .exact import interval_of_expr

        for nx, ny in norm_sym:
            boxes.append(BoxC(interval_of_expr(nx, env), interval_of_expr(ny, env)))
        norm_float = [complex(boxes[i].re.mid, boxes[i].im.mid) for i in range(len(boxes))]
    return norm_float, norm_sym, boxes


def validate_basic_figure(vertices: Sequence[complex], q: int, *,
                          sym_vertices: Sequence[tuple[sp.Expr, sp.Expr]] | None = None,
                          sym_env: dict | None = None,
                          log_ratio: LogRatioStructure | None = None,
                          family: Any = None,
                          name: str = "") -> tuple[ValidationReport, BasicFigure | None]:
    """Run every basic-figure clause; return the report and, when everything
    certifies, the validated figure."""
    env = dict(sym_env or {})
    report = ValidationReport()
    n = len(vertices)
    ell = n - 1
    synthetic = sym_vertices is None
    if synthetic:
        # floats are exact binary rationals; an exact track synthesised from
        # them makes every boundary tie decidable
        sym_vertices = tuple(
            (sp.Rational(Fraction(complex(v).real)), sp.Rational(Fraction(complex(v).imag)))
            for v in vertices)
    if ell < 2:
        report.add(DEGENERATE, FAIL, "need at least two maps")
        return report, None
    if not (1 <= q <= ell - 1):
        report.add(DEGENERATE, FAIL, f"apex index q={q} out of range 1..{ell - 1}")
        return report, None

    verts, syms, boxes = _normalise(list(vertices), sym_vertices, env)
    if synthetic and syms is not None:
        # float input carries roundoff from whatever frame it was produced in;
        # after normalisation, coordinates within 1e-12 of the baseline are
        # taken to mean "on the baseline" so boundary ties stay decidable.
        # Caller-supplied exact coordinates are never adjusted.
        for j in range(n):
            nx, ny = syms[j]
            if ny != 0 and abs(verts[j].imag) <= 1e-12:
                syms[j] = (nx, sp.Integer(0))
                boxes[j] = BoxC(boxes[j].re, Interval.exact(0.0))
                verts[j] = complex(verts[j].real, 0.0)

    def sym_at(j):
        return None if syms is None else syms[j]

    # pairwise distinct
    for i in range(n):
        for j in range(i + 1, n):
            d = boxes[i] - boxes[j]
            sep = d.abs2()
            if sep.is_positive():
                continue
            exact = None
            if syms is not None:
                ex = sp.expand((syms[i][0] - syms[j][0]) ** 2 + (syms[i][1] - syms[j][1]) ** 2)
                exact = ex
            s = _sign_of(sep, exact, env)
            if s == 1:
                continue
            status = FAIL if s == 0 else UNRESOLVED
            report.add(DEGENERATE, status, "coincident vertices", indices=(i, j))
    if report.failures:
        return report, None

    qbox = boxes[q]
    s_apex = _sign_of(qbox.im, None if syms is None else syms[q][1], env)
    if s_apex == 1:
        report.add(VERTEX_OUTSIDE_PI, PASS, "apex above baseline", margin=qbox.im.lo, indices=(q,))
    else:
        report.add(VERTEX_OUTSIDE_PI, FAIL if s_apex is not None else UNRESOLVED,
                   "apex not strictly above baseline", indices=(q,))
        return report, None

    def on_baseline(j) -> tuple[int | None, float]:
        """1 = certified on the closed unit segment, -1 = certified off."""
        b = boxes[j]
        sy = None if syms is None else syms[j][1]
        im_zero = None
        if b.im.lo == b.im.hi == 0.0:
            im_zero = True
        elif not b.im.contains_zero():
            im_zero = False
        elif sy is not None:
            z = sym_is_zero(sy)
            im_zero = z
        if im_zero is False:
            return -1, 0.0
        if im_zero is not True:
            return None, 0.0
        sx = None if syms is None else syms[j][0]
        lo_sign = _sign_of(b.re, sx, env)
        hi_sign = _sign_of(Interval.exact(1.0) - b.re, None if sx is None else sp.expand(1 - sx), env)
        if lo_sign is None or hi_sign is None:
            return None, 0.0
        if lo_sign >= 0 and hi_sign >= 0:
            return 1, min(b.re.lo, 1.0 - b.re.hi)
        return -1, 0.0

    for j in (1, ell - 1):
        status, marg = on_baseline(j)
        if status == 1:
            report.add(NOT_ON_BASELINE, PASS, f"v{j} on baseline", margin=marg, indices=(j,))
        else:
            report.add(NOT_ON_BASELINE, FAIL if status == -1 else UNRESOLVED,
                       f"v{j} must lie on the closed baseline segment", indices=(j,))

    # membership of every vertex in Pi = {apex} u baseline u open triangle
    def strictly_inside(j) -> int | None:
        b = boxes[j]
        signs = []
        tri = [(boxes[0], boxes[-1]), (boxes[-1], qbox), (qbox, boxes[0])]
        tri_sym = None
        if syms is not None:
            tri_sym = [(syms[0], syms[-1]), (syms[-1], syms[q]), (syms[q], syms[0])]
        for k, (p, r) in enumerate(tri):
            cr = (r.re - p.re) * (b.im - p.im) - (r.im - p.im) * (b.re - p.re)
            ex = None
            if tri_sym is not None:
                (px, py), (rx, ry) = tri_sym[k]
                x, y = syms[j]
                ex = sp.expand((rx - px) * (y - py) - (ry - py) * (x - px))
            signs.append(_sign_of(cr, ex, env))
        if any(s is None for s in signs):
            return None
        if all(s == 1 for s in signs):
            return 1
        return -1

    for j in range(n):
        if j == q or j in (0, n - 1):
            continue
        base, _ = on_baseline(j)
        if base == 1:
            continue
        ins = strictly_inside(j)
        if ins == 1:
            continue
        if base is None or ins is None:
            report.add(VERTEX_OUTSIDE_PI, UNRESOLVED, f"v{j} membership undecided", indices=(j,))
        else:
            report.add(VERTEX_OUTSIDE_PI, FAIL, f"v{j} outside the admissible region", indices=(j,))
    # baseline ordering v1 <= v_{l-1}
    if ell >= 3:
        gap = boxes[ell - 1].re - boxes[1].re
        ex = None if syms is None else sp.expand(syms[ell - 1][0] - syms[1][0])
        s = _sign_of(gap, ex, env)
        if s is not None and s < 0:
            report.add(NOT_ON_BASELINE, FAIL, "baseline vertices out of order", indices=(1, ell - 1))

    # contractivity
    for j in range(1, ell + 1):
        r2 = (boxes[j] - boxes[j - 1]).abs2()
        ex = None
        if syms is not None:
            dx = sp.expand(syms[j][0] - syms[j - 1][0])
            dy = sp.expand(syms[j][1] - syms[j - 1][1])
            ex = sp.expand(1 - dx * dx - dy * dy)
        s = _sign_of(Interval.exact(1.0) - r2, ex, env)
        if s == 1:
            report.add(NON_CONTRACTIVE, PASS, f"ratio_{j} < 1", margin=(1.0 - r2.hi), indices=(j,))
        else:
            report.add(NON_CONTRACTIVE, FAIL if s is not None else UNRESOLVED,
                       f"map {j} is not contracting", indices=(j,))
    if report.failures:
        return report, None

    # image triangles
    def tri_boxes(j) -> list[BoxC]:
        a = boxes[j] - boxes[j - 1]
        img = a * qbox + boxes[j - 1]
        return [boxes[j - 1], boxes[j], img]

    def tri_exact(j):
        if syms is None:
            return None
        fig_stub = BasicFigure(verts, q, boxes=boxes, sym_vertices=syms, sym_env=env)
        img = fig_stub.sym_apex_image(j)
        return [syms[j - 1], syms[j], img]

    tris = {j: tri_boxes(j) for j in range(1, ell + 1)}
    tris_sym = {j: tri_exact(j) for j in range(1, ell + 1)}

    # apex images inside the closed triangle
    for j in range(1, ell + 1):
        if j in (1, ell):
            # S_1(apex) = v1*apex and S_l(apex) = v_{l-1} + (1-v_{l-1})*apex
            # are convex combinations along the apex sides once the baseline
            # clauses hold, so containment is structural
            report.add(APEX_IMAGE_OUTSIDE, PASS, f"S_{j}(apex) on apex side",
                       margin=0.0, indices=(j,))
            continue
        img = tris[j][2]
        img_sym = None if tris_sym[j] is None else tris_sym[j][2]
        ok = True
        margin = math.inf
        tri = [(boxes[0], boxes[-1]), (boxes[-1], qbox), (qbox, boxes[0])]
        for k, (p, r) in enumerate(tri):
            cr = (r.re - p.re) * (img.im - p.im) - (r.im - p.im) * (img.re - p.re)
            ex = None
            if syms is not None and img_sym is not None:
                pe = [syms[0], syms[-1], syms[q]][k]
                re_ = [syms[-1], syms[q], syms[0]][k]
                ex = sp.expand((re_[0] - pe[0]) * (img_sym[1] - pe[1])
                               - (re_[1] - pe[1]) * (img_sym[0] - pe[0]))
            s = _sign_of(cr, ex, env)
            if s is None:
                report.add(APEX_IMAGE_OUTSIDE, UNRESOLVED, f"S_{j}(apex) containment undecided",
                           indices=(j,))
                ok = False
                break
            if s < 0:
                if synthetic and cr.lo >= -1e-12:
                    # roundoff image of a touching configuration (same slack
                    # as the baseline canonicalisation above)
                    margin = min(margin, cr.lo)
                    continue
                report.add(APEX_IMAGE_OUTSIDE, FAIL, f"S_{j}(apex) outside closed triangle",
                           indices=(j,))
                ok = False
                break
            margin = min(margin, cr.lo)
        if ok:
            report.add(APEX_IMAGE_OUTSIDE, PASS, f"S_{j}(apex) inside", margin=margin, indices=(j,))

    # pairwise disjoint open image triangles
    for i in range(1, ell + 1):
        for j in range(i + 1, ell + 1):
            status, margin = certified_separation(
                tris[i], tris[j], open_sets=True,
                exact_a=tris_sym[i], exact_b=tris_sym[j], env=env)
            report.add(TRIANGLE_OVERLAP, status,
                       f"open images of maps {i},{j} " +
                       ("disjoint" if status == PASS else "overlap" if status == FAIL else "undecided"),
                       margin=margin, indices=(i, j))

    # side-touch exemption: non-exempt images must avoid both apex sides
    exempt = {1, ell, q, q + 1}
    side_a = [boxes[q], boxes[0]]
    side_b = [boxes[q], boxes[-1]]
    side_a_sym = None if syms is None else [syms[q], syms[0]]
    side_b_sym = None if syms is None else [syms[q], syms[-1]]
    for j in range(1, ell + 1):
        if j in exempt:
            continue
        for side, side_sym, label in ((side_a, side_a_sym, "left"), (side_b, side_b_sym, "right")):
            status, margin = certified_separation(
                tris[j], side, open_sets=False,
                exact_a=tris_sym[j], exact_b=side_sym, env=env)
            report.add(SIDE_TOUCH_VIOLATION, status,
                       f"image {j} vs {label} apex side", margin=margin, indices=(j,))

    if not report.ok:
        return report, None

    # certified exact directions (for degenerate-corner classification)
    edge_args: list[PiMultiple | None] = []
    apex_arg = apex_less_one = None
    if syms is not None:
        stub = BasicFigure(verts, q, boxes=boxes, sym_vertices=syms, sym_env=env)
        for j in range(1, ell + 1):
            ex, ey = stub.sym_edge(j)
            edge_args.append(certified_arg(ex, ey, env))
        qx, qy = syms[q]
        apex_arg = certified_arg(qx, qy, env)
        apex_less_one = certified_arg(sp.expand(qx - 1), qy, env)
    else:
        edge_args = [None] * ell

    figure = BasicFigure(
        verts, q, boxes=boxes, sym_vertices=syms, sym_env=env,
        edge_args=edge_args, apex_arg=apex_arg, apex_less_one_arg=apex_less_one,
        log_ratio=log_ratio, family=family, name=name, report=report)
    return report, figure


def build_basic_figure(vertices: Sequence[complex], q: int, **kwargs) -> BasicFigure:
    """Validate and construct a basic figure; raises InvalidFigureError with
    the full clause report when any clause fails or cannot be certified."""
    report, figure = validate_basic_figure(vertices, q, **kwargs)
    if figure is None:
        raise InvalidFigureError(report)
    return figure
