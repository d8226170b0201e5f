"""Parametrisation and metric geometry of self-similar arcs.

Everything here works from the iterated function system alone: vertex grids
(the images of 0..1 under all depth-k compositions, in arc order), the
natural parametrisation digit algorithm, rigorous diameter and set-distance
bounds via enclosure disks, and the separation constant between non-adjacent
first-level cells.

Cells at depth k are indexed 0..ell^k-1 in *arc order*; grid vertex i is the
common endpoint of cells i-1 and i.  Orientation-reversing maps (signs = -1)
are supported so that sign-pattern casework can be exercised on synthetic
systems, although genuine basic figures are always orientation-preserving.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np
from scipy.spatial import ConvexHull, QhullError, cKDTree

from .geom import BasicFigure, Similitude, SimilitudeSystem

__all__ = [
    "as_system",
    "ordered_words",
    "word_similitude",
    "word_sign",
    "arc_word",
    "vertex_grid",
    "g_eval",
    "digits_of",
    "attractor_diameter_upper",
    "subarc_diameter",
    "delta0",
    "rigorous_set_distance",
    "NoDisjointPairsError",
    "ArcCertificate",
    "ArcVerdict",
    "arc_check",
]

# absolute float cushion subtracted from every claimed lower bound; the
# accumulated roundoff of a few hundred flops on O(1) quantities sits far
# below this
CUSHION = 1e-12


def as_system(obj) -> SimilitudeSystem:
    if isinstance(obj, SimilitudeSystem):
        return obj
    if isinstance(obj, BasicFigure):
        return SimilitudeSystem(obj.maps)
    fig = getattr(obj, "figure", None)
    if isinstance(fig, BasicFigure):
        return SimilitudeSystem(fig.maps)
    return SimilitudeSystem(tuple(obj))


def _signs(system: SimilitudeSystem) -> tuple[int, ...]:
    return system.signs if system.signs is not None else (1,) * system.ell


# ---------------------------------------------------------------------------
# arc order of cells
# ---------------------------------------------------------------------------


def ordered_words(system, depth: int) -> Iterator[tuple[int, ...]]:
    """Depth-`depth` words (1-based letters) in the order their cells appear
    along the arc."""
    system = as_system(system)
    signs = _signs(system)
    ell = system.ell

    def rec(prefix: tuple[int, ...], sign: int, d: int):
        if d == 0:
            yield prefix
            return
        letters = range(1, ell + 1) if sign > 0 else range(ell, 0, -1)
        for letter in letters:
            yield from rec(prefix + (letter,), sign * signs[letter - 1], d - 1)

    return rec((), 1, depth)


def word_sign(system, word: Sequence[int]) -> int:
    signs = _signs(as_system(system))
    out = 1
    for letter in word:
        out *= signs[letter - 1]
    return out


def word_similitude(system, word: Sequence[int]) -> Similitude:
    system = as_system(system)
    out = Similitude(1.0 + 0.0j, 0.0 + 0.0j)
    for letter in word:
        out = out.compose(system.maps[letter - 1])
    return out


def arc_word(system, depth: int, index: int) -> tuple[int, ...]:
    """The word of the index-th depth-`depth` cell in arc order, O(depth)."""
    system = as_system(system)
    signs = _signs(system)
    ell = system.ell
    if not 0 <= index < ell ** depth:
        raise ValueError("cell index out of range")
    word = []
    sign = 1
    rem = index
    for lev in range(depth):
        block = ell ** (depth - lev - 1)
        c, rem = divmod(rem, block)
        letter = c + 1 if sign > 0 else ell - c
        word.append(letter)
        sign *= signs[letter - 1]
    return tuple(word)


def _aligned_cells(ell: int, depth: int, start: int, stop: int) -> list[tuple[int, int]]:
    """Greedy decomposition of an arc-order cell range into maximal aligned
    blocks; each (d, i) names cell i at depth d."""
    out = []
    pos = start
    while pos < stop:
        size = 1
        d = depth
        while d > 0 and pos % (size * ell) == 0 and pos + size * ell <= stop:
            size *= ell
            d -= 1
        out.append((d, pos // size))
        pos += size
    return out


# ---------------------------------------------------------------------------
# vertex grids
# ---------------------------------------------------------------------------


def vertex_grid(obj, depth: int) -> np.ndarray:
    """The ell^depth + 1 cell endpoints in arc order.

    Built top-down so the grids are exactly nested: vertex i of the depth-k
    grid equals vertex i*ell of the depth-(k+1) grid, float for float.
    """
    system = as_system(obj)
    signs = _signs(system)
    ell = system.ell
    grid = np.array([0.0 + 0.0j, 1.0 + 0.0j])
    for _ in range(depth):
        n = len(grid)
        out = np.empty(ell * (n - 1) + 1, dtype=complex)
        for d in range(ell):
            block = grid if signs[d] > 0 else grid[::-1]
            m = system.maps[d]
            # later blocks overwrite the shared joint, keeping it exact
            out[d * (n - 1): (d + 1) * (n - 1) + 1] = m.a * block + m.b
        grid = out
    return grid


def digits_of(x: Fraction, ell: int, signs: Sequence[int], count: int) -> list[int]:
    """First `count` letters (1-based) of the arc address of parameter x,
    following orientation flips."""
    word = []
    for _ in range(count):
        i = int(x * ell)
        if i >= ell:
            i = ell - 1
        t = x * ell - i
        word.append(i + 1)
        x = t if signs[i] > 0 else 1 - t
    return word


def g_eval(obj, x, depth: int = 40) -> tuple[complex, float]:
    """Evaluate the arc parametrisation at a rational parameter.

    Returns (point, error_bound): the image of the finite address word
    applied to 0, together with a rigorous bound on the distance to the true
    point g(x).
    """
    system = as_system(obj)
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise ValueError("parameter must lie in [0, 1]")
    word = digits_of(x, system.ell, _signs(system), depth)
    S = word_similitude(system, word)
    err = S.ratio * attractor_diameter_upper(system) + CUSHION
    return S(0.0), err


# ---------------------------------------------------------------------------
# diameters
# ---------------------------------------------------------------------------


def _pairwise_diameter(points: np.ndarray) -> float:
    """Exact max pairwise distance of a point cloud (hull first, quadratic
    fallback for degenerate clouds)."""
    pts = np.column_stack([points.real, points.imag])
    if len(pts) > 16:
        try:
            hull = ConvexHull(pts)
            pts = pts[hull.vertices]
        except QhullError:
            # collinear cloud: extremes along the span direction suffice
            centred = pts - pts.mean(axis=0)
            direction = centred[np.argmax(np.einsum("ij,ij->i", centred, centred))]
            t = centred @ direction
            lo, hi = pts[np.argmin(t)], pts[np.argmax(t)]
            return float(np.hypot(*(hi - lo)))
    d2 = np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
    return float(math.sqrt(d2.max()))


_DIAM_CACHE: dict[tuple, float] = {}


def attractor_diameter_upper(obj, depth: int | None = None) -> float:
    """Rigorous upper bound on diam(K).

    Every point of K lies within R^m * diam(K) of a depth-m vertex, so
    diam(K) <= diam(grid_m) / (1 - 2 R^m) once 2 R^m < 1.
    """
    system = as_system(obj)
    key = (system.maps, system.signs, depth)
    hit = _DIAM_CACHE.get(key)
    if hit is not None:
        return hit
    R = system.max_ratio
    if R >= 1:
        raise ValueError("system is not contracting")
    if depth is None:
        # deepest grid we are willing to enumerate
        cap = max(1, int(math.log(2e5) / math.log(system.ell)))
        depth = 1
        while 2 * R ** depth >= 0.5 and depth < cap:
            depth += 1
    shrink = 2 * R ** depth
    if shrink >= 1:
        raise ValueError("system contracts too slowly for this grid depth")
    d = _pairwise_diameter(vertex_grid(system, depth))
    out = d / (1 - shrink) + CUSHION
    _DIAM_CACHE[key] = out
    return out


def subarc_diameter(obj, depth: int, i: int, j: int, refine: int = 3) -> tuple[float, float]:
    """Two-sided bound for the diameter of the sub-arc spanning grid
    positions i..j at the given depth (the union of cells i..j-1).

    The lower bound is the exact diameter of the refined vertex slice; the
    upper bound inflates it by twice the largest refined-cell diameter.
    """
    system = as_system(obj)
    ell = system.ell
    if not 0 <= i < j <= ell ** depth:
        raise ValueError("need 0 <= i < j <= ell**depth")
    grid = vertex_grid(system, depth + refine)
    step = ell ** refine
    pts = grid[i * step: j * step + 1]
    lo = _pairwise_diameter(pts)
    L = attractor_diameter_upper(system)
    hi = lo + 2 * system.max_ratio ** (depth + refine) * L + CUSHION
    return max(lo - CUSHION, 0.0), hi


class NoDisjointPairsError(ValueError):
    """The first level has no non-adjacent cell pairs (ell < 3)."""


def delta0(obj, refine: int = 6) -> float:
    """Rigorous positive lower bound for the minimum distance between
    non-adjacent first-level cells, or raise if no such pair exists."""
    system = as_system(obj)
    ell = system.ell
    if ell < 3:
        raise NoDisjointPairsError("no pairs of non-adjacent first-level cells")
    grid = vertex_grid(system, 1 + refine)
    step = ell ** refine
    L = attractor_diameter_upper(system)
    slack = 2 * system.max_ratio ** (1 + refine) * L
    best = math.inf
    for a in range(ell):
        pts_a = grid[a * step:(a + 1) * step + 1]
        tree = cKDTree(np.column_stack([pts_a.real, pts_a.imag]))
        for b in range(a + 2, ell):
            pts_b = grid[b * step:(b + 1) * step + 1]
            d, _ = tree.query(np.column_stack([pts_b.real, pts_b.imag]), k=1)
            best = min(best, float(d.min()))
    return best - slack - CUSHION


# ---------------------------------------------------------------------------
# rigorous distance between unions of cells
# ---------------------------------------------------------------------------


def _anchor_radius(system: SimilitudeSystem) -> tuple[complex, float]:
    """A point c and rho with K contained in the disk B(c, rho)."""
    grid = vertex_grid(system, 2)
    c = complex(grid.mean())
    rho = float(np.abs(grid - c).max()) + system.max_ratio ** 2 * attractor_diameter_upper(system)
    return c, rho + CUSHION


def rigorous_set_distance(obj, cells_a: tuple[int, int, int], cells_b: tuple[int, int, int],
                          *, rel_tol: float = 1e-6, max_nodes: int = 200_000) -> tuple[float, float]:
    """Two-sided bound for dist(A, B) where A and B are unions of cells.

    Each argument is (depth, start, stop): cells start..stop-1 at the given
    depth.  Branch-and-bound over pairs of enclosure disks; each node carries
    the affine parameters of both cells, so splitting is exact map
    composition.  Returns (lower, upper) with upper/lower - 1 <= rel_tol
    unless the node budget runs out (the bracket is still valid then).
    """
    system = as_system(obj)
    ell = system.ell
    c0, rho = _anchor_radius(system)

    def initial(cells):
        depth, start, stop = cells
        if not 0 <= start < stop <= ell ** depth:
            raise ValueError("bad cell range")
        # coarsen to maximal aligned blocks; the search refines adaptively
        return [word_similitude(system, arc_word(system, d, i))
                for d, i in _aligned_cells(ell, depth, start, stop)]

    A = initial(cells_a)
    B = initial(cells_b)

    def centre(S: Similitude) -> complex:
        return S(c0)

    best_upper = min(abs(centre(Sa) - centre(Sb)) + (Sa.ratio + Sb.ratio) * rho
                     for Sa in A for Sb in B)
    heap: list[tuple[float, int, Similitude, Similitude]] = []
    counter = 0
    for Sa in A:
        for Sb in B:
            lo = abs(centre(Sa) - centre(Sb)) - (Sa.ratio + Sb.ratio) * rho
            heapq.heappush(heap, (lo, counter, Sa, Sb))
            counter += 1

    nodes = 0
    while heap and nodes < max_nodes:
        lo, _, Sa, Sb = heap[0]
        if lo > 0 and best_upper <= lo * (1 + rel_tol):
            break
        heapq.heappop(heap)
        nodes += 1
        if Sa.ratio >= Sb.ratio:
            children = [(Sa.compose(m), Sb) for m in system.maps]
        else:
            children = [(Sa, Sb.compose(m)) for m in system.maps]
        for ca, cb in children:
            d = abs(centre(ca) - centre(cb))
            rad = (ca.ratio + cb.ratio) * rho
            best_upper = min(best_upper, d + rad)
            child_lo = d - rad
            if child_lo <= best_upper:
                heapq.heappush(heap, (child_lo, counter, ca, cb))
                counter += 1

    lower = heap[0][0] if heap else best_upper
    lower = max(lower - CUSHION, 0.0)
    return lower, best_upper + CUSHION


# ---------------------------------------------------------------------------
# arc certification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ArcCertificate:
    """Why the attractor passes through corner z_p without self-contact.

    ``AnglePositive``: the corner angle is certified positive, so the two
    point families approaching z_p stay inside disjoint sectors.
    ``FamilyAnalytic``: a family annotation proves u - j*x + k*y never
    vanishes (number-theoretic argument valid for *all* j, k).
    ``BoundedDiophantine``: directed-rounding intervals certify
    u - j*x + k*y != 0 for all j, k up to ``bound`` only.
    """

    p: int
    kind: str
    bound: int | None = None
    min_margin: float | None = None

    def as_dict(self) -> dict:
        return {"p": self.p, "kind": self.kind, "bound": self.bound,
                "min_margin": self.min_margin}


@dataclass(frozen=True)
class ArcVerdict:
    """Is the attractor a Jordan arc?

    ``Arc`` requires every corner to carry a certificate valid for all
    depths (positive angle or a family-analytic argument); corners settled
    only by a finite Diophantine scan cap the claim at ``ArcUpToBound``.
    ``NotArc`` carries an exact collision witness Z_j = W_k.
    """

    status: str
    certificates: tuple[ArcCertificate, ...]
    witness: dict | None = None
    unresolved: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return {"status": self.status,
                "certificates": [c.as_dict() for c in self.certificates],
                "witness": dict(self.witness) if self.witness else None,
                "unresolved": list(self.unresolved)}


def _interval_corner_scan(figure: BasicFigure, p: int, bound: int):
    """Certify u - j*x + k*y != 0 for 0 <= j, k <= bound with intervals.

    For fixed j the margin is strictly increasing in k, so only the few k
    nearest the sign change need interval evaluation; the monotone tails
    are covered by the neighbours' bounds.  Returns (ok, min_margin,
    straddles) where straddles lists the (j, k) the intervals could not
    separate from zero.
    """
    from .intervals import BoxC

    riv = figure.ratio_intervals()
    lam, mu = riv[-1], riv[0]
    alpha = riv[p - 1] * abs(BoxC.exact(1.0) - figure.boxes[figure.q])
    beta = riv[p] * abs(figure.boxes[figure.q])
    x = -(lam.log())
    y = -(mu.log())
    u = alpha.log() - beta.log()
    xf, yf, uf = x.mid, y.mid, u.mid

    min_margin = math.inf
    straddles: list[tuple[int, int]] = []
    for j in range(bound + 1):
        k_star = int(round((j * xf - uf) / yf))
        for k in range(max(0, k_star - 2), min(bound, k_star + 2) + 1):
            m = u - x * j + y * k
            mag = m.mig()
            if mag == 0.0 and m.contains_zero():
                straddles.append((j, k))
            else:
                min_margin = min(min_margin, mag)
    return not straddles, min_margin, straddles


def _exact_collision(figure: BasicFigure, p: int, j: int, k: int) -> bool | None:
    """Exact test of alpha^2 lambda^(2j) == beta^2 mu^(2k) on the sym track."""
    if figure.sym_vertices is None:
        return None
    from .exact import sym_is_zero
    import sympy as sp

    def sq(vec):
        return sp.expand(vec[0] ** 2 + vec[1] ** 2)

    qx, qy = figure.sym_vertices[figure.q]
    alpha2 = sq(figure.sym_edge(p)) * sp.expand((1 - qx) ** 2 + qy ** 2)
    beta2 = sq(figure.sym_edge(p + 1)) * sp.expand(qx ** 2 + qy ** 2)
    lam2 = sq(figure.sym_edge(figure.ell))
    mu2 = sq(figure.sym_edge(1))
    return sym_is_zero(sp.expand(alpha2 * lam2 ** j - beta2 * mu2 ** k))


def arc_check(figure: BasicFigure, bound: int = 10_000) -> ArcVerdict:
    """Certify that the attractor of a basic figure is a Jordan arc.

    Positive corner angles certify their corners outright.  At a zero
    corner the points Z_j and W_k collide iff u - j*x + k*y = 0; a family
    annotation can rule that out for all j, k, otherwise a directed-rounding
    scan rules it out up to ``bound`` and the verdict says so.
    """
    from .conditions import POSITIVE, ZERO, angle_profile

    prof = angle_profile(figure)
    unresolved = prof.unresolved()
    if any(a.status not in (POSITIVE, ZERO) for a in prof.theta):
        return ArcVerdict("Unknown", (), unresolved=unresolved)

    certs: list[ArcCertificate] = []
    capped = False
    fam = figure.family
    for p, angle in enumerate(prof.theta, start=1):
        if angle.status == POSITIVE:
            certs.append(ArcCertificate(p, "AnglePositive"))
            continue
        if fam is not None and getattr(fam, "margins_nonzero", False):
            certs.append(ArcCertificate(p, "FamilyAnalytic"))
            continue
        ok, min_margin, straddles = _interval_corner_scan(figure, p, bound)
        if not ok:
            for j, k in straddles:
                hit = _exact_collision(figure, p, j, k)
                if hit is True:
                    return ArcVerdict(
                        "NotArc", tuple(certs),
                        witness={"p": p, "j": j, "k": k,
                                 "relation": "alpha*lambda^j == beta*mu^k"})
            return ArcVerdict("Unknown", tuple(certs),
                              unresolved=unresolved + tuple(
                                  f"margin({p};{j},{k})" for j, k in straddles))
        certs.append(ArcCertificate(p, "BoundedDiophantine", bound=bound,
                                    min_margin=min_margin))
        capped = True
    status = "ArcUpToBound" if capped else "Arc"
    return ArcVerdict(status, tuple(certs), unresolved=unresolved)
