"""Dimension, self-similar measures, and Whitney-type weight schemes.

The natural measure on the attractor assigns cylinder S_w(K) the weight
prod r_{w_i}^s where s is the Moran exponent; the measure coordinate f of a
vertex is the accumulated measure of the cells preceding it in arc order.
The weight-scheme constructor perturbs the natural exponents level by level
(s_k -> s' from above) while pinning the two end maps to a common level
weight tau_k, which is the standard device for building a measure whose
coordinate has prescribed modulus behaviour near the degenerate corners.

All root solves are monotone bisections run to a fixed residual, never to an
iteration count, so results are reproducible bit for bit across platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .arc import (
    NoDisjointPairsError,  # re-exported for callers  # noqa: F401
    as_system,
    ordered_words,
    rigorous_set_distance,
    word_similitude,
    word_sign,
)
from .geom import SimilitudeSystem

__all__ = [
    "bisect_to_residual",
    "hausdorff_dimension",
    "natural_weights",
    "cylinder_measure",
    "cell_measures",
    "f_vertices",
    "f_vertex",
    "iterate_system",
    "check_forget",
    "epsilon_sequence",
    "WhitneyWeights",
    "whitney_weights",
    "whitney_measure_cylinder",
    "whitney_cell_measures",
    "whitney_f_vertex",
    "check_lemma32_iii",
    "PreconditionForget",
    "InsufficientMiddleMaps",
    "NonpositiveBound",
    "DepthExceedsWeights",
]

RESIDUAL = 1e-12


class PreconditionForget(ValueError):
    """The end-map forgetting hypothesis fails at this exponent."""


class InsufficientMiddleMaps(ValueError):
    """The construction needs at least one map strictly between the ends."""


class NonpositiveBound(ValueError):
    """A rigorous lower bound came out nonpositive; refine further."""


class DepthExceedsWeights(ValueError):
    """Word is deeper than the constructed weight levels."""


def bisect_to_residual(fn, lo: float, hi: float, *, residual: float = RESIDUAL,
                       max_iter: int = 300) -> float:
    """Root of a monotone function by bisection, run until |fn| <= residual."""
    flo, fhi = fn(lo), fn(hi)
    if abs(flo) <= residual:
        return lo
    if abs(fhi) <= residual:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ValueError("bisection endpoints do not bracket a root")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if abs(fm) <= residual:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo <= math.ulp(mid):
            break
    mid = 0.5 * (lo + hi)
    if abs(fn(mid)) <= residual:
        return mid
    raise ArithmeticError("bisection cannot reach the requested residual")


def _ratios(obj) -> tuple[float, ...]:
    if isinstance(obj, (tuple, list)) and obj and isinstance(obj[0], (int, float)):
        return tuple(float(r) for r in obj)
    return as_system(obj).ratios


def hausdorff_dimension(obj) -> float:
    """The Moran exponent: sum r_j^s = 1."""
    ratios = _ratios(obj)
    if any(not 0 < r < 1 for r in ratios):
        raise ValueError("ratios must lie in (0, 1)")
    fn = lambda s: math.fsum(r ** s for r in ratios) - 1.0
    hi = 1.0
    while fn(hi) > 0:
        hi *= 2
    return bisect_to_residual(fn, 0.0, hi)


def natural_weights(obj, s: float | None = None) -> np.ndarray:
    ratios = np.asarray(_ratios(obj))
    if s is None:
        s = hausdorff_dimension(obj)
    return ratios ** s


def cylinder_measure(obj, word: Sequence[int], s: float | None = None) -> float:
    """Measure of the cylinder cell of a (1-based) word; empty word -> 1."""
    w = natural_weights(obj, s)
    out = 1.0
    for letter in word:
        out *= w[letter - 1]
    return out


def _arc_ordered_products(per_level: list[np.ndarray], signs: tuple[int, ...]) -> np.ndarray:
    """Products of per-level weights over all words, in arc order.

    per_level[i][j] is the factor contributed by letter j+1 at level i+1.
    Arc order interleaves reversed blocks wherever a sign is negative.
    """
    out = np.array([1.0])
    for level in range(len(per_level) - 1, -1, -1):
        w = per_level[level]
        ell = len(w)
        n = len(out)
        nxt = np.empty(ell * n)
        for d in range(ell):
            block = out if signs[d] > 0 else out[::-1]
            nxt[d * n:(d + 1) * n] = w[d] * block
        out = nxt
    return out


def cell_measures(obj, depth: int, s: float | None = None) -> np.ndarray:
    """Measures of all depth-`depth` cells in arc order."""
    system = as_system(obj)
    signs = system.signs or (1,) * system.ell
    w = natural_weights(system, s)
    return _arc_ordered_products([w] * depth, signs)


def f_vertices(obj, depth: int, s: float | None = None) -> np.ndarray:
    """Values of the measure coordinate f at the depth-`depth` grid vertices.

    Normalised by the accumulated total, so f at the last vertex is exactly
    1.0 and monotonicity is inherited from the positive cell measures.
    """
    meas = cell_measures(obj, depth, s)
    acc = np.concatenate([[0.0], np.cumsum(meas)])
    return acc / acc[-1]


def f_vertex(obj, s: float, j: int, depth: int) -> float:
    return float(f_vertices(obj, depth, s)[j])


def iterate_system(obj, k: int) -> SimilitudeSystem:
    """The depth-k composition system, maps listed in arc order."""
    if k < 1:
        raise ValueError("k >= 1 required")
    system = as_system(obj)
    maps = []
    sgns = []
    for wrd in ordered_words(system, k):
        maps.append(word_similitude(system, wrd))
        sgns.append(word_sign(system, wrd))
    signs = tuple(sgns)
    return SimilitudeSystem(tuple(maps), signs if any(s < 0 for s in signs) else None)


# ---------------------------------------------------------------------------
# weight schemes
# ---------------------------------------------------------------------------


def check_forget(obj, s_tilde: float) -> tuple[bool, float]:
    """Whether the two end ratios can be forgotten at exponent s_tilde:
    r_1^st + r_l^st < sum_j r_j^st - 1.  Returns (holds, margin)."""
    ratios = _ratios(obj)
    lhs = ratios[0] ** s_tilde + ratios[-1] ** s_tilde
    rhs = math.fsum(r ** s_tilde for r in ratios) - 1.0
    return lhs < rhs, rhs - lhs


def epsilon_sequence(obj, K: int, *, rel_tol: float = 1e-3,
                     max_nodes: int = 80_000) -> tuple[float, ...]:
    """Rigorous lower bounds for the corner clearances eps_1 >= ... >= eps_K.

    eps_k is the smallest, over interior vertices z_j, of 1 and the distances
    between the sub-arc stopping a (k+1)-scale step short of z_j and the
    neighbouring first-level cell (both orders).  Using lower bounds only
    strengthens every inequality they enter.
    """
    system = as_system(obj)
    ell = system.ell
    if ell < 3:
        raise InsufficientMiddleMaps("corner clearances need ell >= 3")
    out = []
    for k in range(1, K + 1):
        step = ell ** k
        worst = 1.0
        for j in range(1, ell):
            a = (k + 1, (j - 1) * step, j * step - 1)
            b = (1, j, j + 1)
            lo1, _ = rigorous_set_distance(system, a, b, rel_tol=rel_tol, max_nodes=max_nodes)
            a2 = (1, j - 1, j)
            b2 = (k + 1, j * step + 1, (j + 1) * step)
            lo2, _ = rigorous_set_distance(system, a2, b2, rel_tol=rel_tol, max_nodes=max_nodes)
            worst = min(worst, lo1, lo2)
        if worst <= 0:
            raise NonpositiveBound(f"clearance bound nonpositive at level {k}")
        out.append(worst)
    # enforce monotonicity (a smaller later clearance is still a valid bound
    # for earlier levels' minima never increase in k by definition)
    for i in range(1, len(out)):
        out[i] = min(out[i], out[i - 1])
    return tuple(out)


@dataclass(frozen=True)
class WhitneyWeights:
    """Level-indexed cell weights r_{j,k} built from a forgetting exponent.

    level_weights[k-1][j-1] is the level-k weight of letter j; the end
    letters share the level weight tau_k and the middle letters carry
    r_j^{s_k} with s_k decreasing to s' from above.
    """

    ratios: tuple[float, ...]
    s: float
    s_tilde: float
    s_prime: float
    gamma: float
    eps: tuple[float, ...]
    tau_prime: tuple[float, ...]
    tau: tuple[float, ...]
    s_levels: tuple[float, ...]
    level_weights: tuple[tuple[float, ...], ...]

    @property
    def K(self) -> int:
        return len(self.level_weights)


def whitney_weights(obj, s_tilde: float, eps: Sequence[float], K: int) -> WhitneyWeights:
    ratios = _ratios(obj)
    ell = len(ratios)
    if ell < 3:
        raise InsufficientMiddleMaps("need maps strictly between the end maps")
    holds, margin = check_forget(ratios, s_tilde)
    if not holds:
        raise PreconditionForget(f"forgetting margin {margin:.6g} <= 0 at s~={s_tilde}")
    if len(eps) < K:
        raise ValueError("need one clearance per level")
    s = hausdorff_dimension(ratios)
    mid = ratios[1:-1]

    def mid_sum(expnt: float) -> float:
        return math.fsum(r ** expnt for r in mid)

    fn = lambda t: mid_sum(t) - 1.0
    hi = 1.0
    while fn(hi) > 0:
        hi *= 2
    s_prime = bisect_to_residual(fn, 0.0, hi)
    r_min = min(ratios)
    gamma = 0.5 * min(s - s_prime, 6.0 * math.log1p(eps[0]) / (math.pi ** 2 * math.log(1 / r_min)))
    if gamma <= 0:
        raise PreconditionForget("no room between s' and s")
    tau_prime = []
    tau = []
    s_levels = []
    weights = []
    for k in range(1, K + 1):
        tpk = 0.5 * (1.0 - mid_sum(s_prime + gamma / k ** 2))
        tk = min(ratios[0] ** s, ratios[-1] ** s, eps[k - 1] ** s_tilde, tpk)
        if tk <= 0:
            raise NonpositiveBound(f"level weight nonpositive at level {k}")
        sk = bisect_to_residual(lambda t: mid_sum(t) - (1.0 - 2.0 * tk),
                                s_prime, s + 1.0)
        tau_prime.append(tpk)
        tau.append(tk)
        s_levels.append(sk)
        weights.append((tk,) + tuple(r ** sk for r in mid) + (tk,))
    return WhitneyWeights(
        ratios=tuple(ratios), s=s, s_tilde=s_tilde, s_prime=s_prime, gamma=gamma,
        eps=tuple(eps[:K]), tau_prime=tuple(tau_prime), tau=tuple(tau),
        s_levels=tuple(s_levels), level_weights=tuple(tuple(w) for w in weights))


def whitney_measure_cylinder(word: Sequence[int], weights: WhitneyWeights) -> float:
    if len(word) > weights.K:
        raise DepthExceedsWeights(f"word depth {len(word)} > K={weights.K}")
    out = 1.0
    for level, letter in enumerate(word):
        out *= weights.level_weights[level][letter - 1]
    return out


def whitney_cell_measures(obj, weights: WhitneyWeights, depth: int) -> np.ndarray:
    if depth > weights.K:
        raise DepthExceedsWeights(f"depth {depth} > K={weights.K}")
    system = as_system(obj)
    signs = system.signs or (1,) * system.ell
    per_level = [np.asarray(weights.level_weights[i]) for i in range(depth)]
    return _arc_ordered_products(per_level, signs)


def whitney_f_vertex(obj, weights: WhitneyWeights, j: int, depth: int) -> float:
    meas = whitney_cell_measures(obj, weights, depth)
    acc = np.concatenate([[0.0], np.cumsum(meas)])
    return float(acc[j] / acc[-1])


def check_lemma32_iii(weights: WhitneyWeights, max_prefix_depth: int = 3,
                      max_e_depth: int = 3) -> float:
    """Worst ratio of mu(S_prefix(E)) to (1+eps_1) * (prod r_prefix)^{s'} * mu(E)
    over ALL cylinder pairs with the given depths (<= 1 means no violation).

    The ratio factorises over letter positions, so the exhaustive maximum is
    a product of per-level, per-letter maxima rather than an enumeration.
    """
    lw = weights.level_weights
    r = weights.ratios
    sp_ = weights.s_prime
    worst = 0.0
    for a in range(0, max_prefix_depth + 1):
        for b in range(0, max_e_depth + 1):
            if a + b > weights.K:
                continue
            A = 1.0
            for i in range(a):
                A *= max(lw[i][j] / r[j] ** sp_ for j in range(len(r)))
            B = 1.0
            for i in range(b):
                B *= max(lw[a + i][j] / lw[i][j] for j in range(len(r)))
            worst = max(worst, A * B)
    return worst / (1.0 + weights.eps[0])
