"""Corner angles, Diophantine data, and evidence for the Whitney and
quasi-arc conditions.

A positive corner angle at z_p settles both Condition W_p and Condition
Q_p^t outright (the law-of-sines argument).  A degenerate corner reduces to
how well u = log(alpha/beta) is approximated by j*x - k*y over nonnegative
integers, where x = -log(lambda), y = -log(mu).  Finite scans can only ever
produce *evidence* for the little-o / bounded-constant statements, so the
verdict taxonomy keeps analytic certificates separate from scan outcomes.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
import sympy as sp

from .arc import as_system, attractor_diameter_upper, subarc_diameter, vertex_grid
from .exact import PiMultiple, exact_direction_between, sym_sign
from .geom import BasicFigure
from .intervals import BoxC

_EPS = math.ulp(1.0)

POSITIVE = "positive"
ZERO = "zero"
UNRESOLVED = "unresolved"

HOLDS_ANALYTIC = "HoldsAnalytic"
HOLDS_RATIONAL_RATIO = "HoldsRationalRatio"
EVIDENCE_FOR = "EvidenceFor"
EVIDENCE_AGAINST = "EvidenceAgainst"
UNKNOWN = "Unknown"

#: Certificate strength, strongest first; the global verdict is the weakest
#: certificate among the per-corner ones.
STRENGTH = {
    HOLDS_ANALYTIC: 4,
    HOLDS_RATIONAL_RATIO: 3,
    EVIDENCE_FOR: 2,
    UNKNOWN: 1,
    EVIDENCE_AGAINST: 0,
}

_TWO_PI = 2.0 * math.pi
# Relative change over a doubling below which a running supremum counts as
# stabilised, and above which it counts as growing.  Ties land in between
# and yield Unknown.
_TREND_TOL = math.log(1.01)


class UnresolvedAngle(ValueError):
    """A corner angle could not be certified zero or positive."""


class AnglePositive(ValueError):
    """Diophantine data was requested at a corner with a positive angle."""


# ---------------------------------------------------------------------------
# angle profile
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CornerAngle:
    """One angle with its certification status.

    ``value`` is a representative in [0, 2*pi); when ``exact`` is set the
    value is that rational multiple of pi.  ``status`` is ``zero`` or
    ``positive`` only when certified by exact arithmetic or by an interval
    bound that excludes the degenerate configuration.
    """

    label: str
    value: float
    status: str
    exact: PiMultiple | None = None

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class AngleProfile:
    theta: tuple[CornerAngle, ...]      # corner angles at z_1 .. z_{l-1}
    eta1: CornerAngle
    eta2: CornerAngle
    varrho: tuple[CornerAngle, ...]     # angle between the incident edges at z_p
    psi: tuple[float, ...]              # min(theta_p, varrho_p)

    @property
    def theta_min(self) -> float:
        return min(a.value for a in self.theta)

    @property
    def eta0(self) -> float:
        return min(self.eta1.value, self.eta2.value)

    @property
    def xi(self) -> float:
        """The characteristic angle theta_min + eta0."""
        return self.theta_min + self.eta0

    def zero_corners(self) -> tuple[int, ...]:
        return tuple(p for p, a in enumerate(self.theta, start=1) if a.status == ZERO)

    def unresolved(self) -> tuple[str, ...]:
        out = [a.label for a in self.theta if a.status == UNRESOLVED]
        for a in (self.eta1, self.eta2):
            if a.status == UNRESOLVED:
                out.append(a.label)
        return tuple(out)

    @property
    def regular(self) -> bool | None:
        """Certified positivity of the characteristic angle (None = undecided)."""
        etas_positive = self.eta1.status == POSITIVE and self.eta2.status == POSITIVE
        if etas_positive:
            return True
        statuses = [a.status for a in self.theta]
        if all(s == POSITIVE for s in statuses):
            return True
        if UNRESOLVED in statuses or self.eta1.status == UNRESOLVED \
                or self.eta2.status == UNRESOLVED:
            return None
        # all angles resolved, some corner angle is zero, some eta is zero
        return False

    def as_dict(self) -> dict:
        def one(a: CornerAngle) -> dict:
            d = {"label": a.label, "value": a.value, "status": a.status}
            if a.exact is not None:
                d["pi_multiple"] = str(a.exact.frac)
            return d

        return {
            "theta": [one(a) for a in self.theta],
            "eta1": one(self.eta1),
            "eta2": one(self.eta2),
            "varrho": [one(a) for a in self.varrho],
            "psi": list(self.psi),
            "theta_min": self.theta_min,
            "eta0": self.eta0,
            "xi": self.xi,
            "regular": self.regular,
        }


@dataclass(frozen=True)
class _Vec:
    """A complex quantity on all three tracks (float / box / exact)."""

    z: complex
    box: BoxC
    pm: PiMultiple | None                      # certified arg, if rational*pi
    sym: tuple[sp.Expr, sp.Expr] | None        # exact (re, im)


def _vec_mul(a: _Vec, b: _Vec) -> _Vec:
    sym = None
    if a.sym is not None and b.sym is not None:
        ax, ay = a.sym
        bx, by = b.sym
        sym = (sp.expand(ax * bx - ay * by), sp.expand(ax * by + ay * bx))
    pm = a.pm + b.pm if (a.pm is not None and b.pm is not None) else None
    return _Vec(a.z * b.z, a.box * b.box, pm, sym)


def _vec_neg(a: _Vec) -> _Vec:
    sym = None if a.sym is None else (sp.expand(-a.sym[0]), sp.expand(-a.sym[1]))
    pm = None if a.pm is None else a.pm + PiMultiple.of(1)
    return _Vec(-a.z, -a.box, pm, sym)


def _edge_vec(fig: BasicFigure, j: int) -> _Vec:
    z = fig.vertices[j] - fig.vertices[j - 1]
    box = fig.boxes[j] - fig.boxes[j - 1]
    return _Vec(z, box, fig.edge_args[j - 1], fig.sym_edge(j))


def _apex_vec(fig: BasicFigure) -> _Vec:
    sym = fig.sym_vertices[fig.q] if fig.sym_vertices is not None else None
    return _Vec(fig.apex, fig.boxes[fig.q], fig.apex_arg, sym)


def _apex_minus_one_vec(fig: BasicFigure) -> _Vec:
    sym = None
    if fig.sym_vertices is not None:
        qx, qy = fig.sym_vertices[fig.q]
        sym = (sp.expand(qx - 1), qy)
    return _Vec(fig.apex - 1.0, fig.boxes[fig.q] - BoxC.exact(1.0),
                fig.apex_less_one_arg, sym)


def _angle_between(label: str, num: _Vec, den: _Vec, env) -> CornerAngle:
    """The angle arg(num/den) in [0, 2*pi), with certification."""
    value = cmath.phase(num.z / den.z) % _TWO_PI
    if num.pm is not None and den.pm is not None:
        pm = num.pm - den.pm
        return CornerAngle(label, 0.0 if pm.is_zero else float(pm),
                           ZERO if pm.is_zero else POSITIVE, pm)
    # interval route: num * conj(den) has argument equal to the angle
    w = num.box * den.box.conj()
    if w.im.is_positive() or w.im.is_negative() or w.re.is_negative():
        return CornerAngle(label, value, POSITIVE)
    # the interval test cannot separate "zero" from "tiny positive";
    # escalate to the exact direction test when an exact track exists
    if num.sym is not None and den.sym is not None:
        same = exact_direction_between(num.sym, den.sym, env or None)
        if same is True:
            return CornerAngle(label, 0.0, ZERO)
        if same is False:
            return CornerAngle(label, value, POSITIVE)
    return CornerAngle(label, value, UNRESOLVED)


def angle_profile(figure: BasicFigure) -> AngleProfile:
    """All corner and side angles of a validated basic figure.

    ``theta_p`` is the angle at z_p between the incoming and outgoing apex
    images, ``eta_1``/``eta_2`` measure how the apex cell hugs the triangle
    sides, and ``varrho_p`` is the turning angle of the polygon itself.
    """
    env = figure.sym_env or None
    apex = _apex_vec(figure)
    apex_m1 = _apex_minus_one_vec(figure)
    q = figure.q

    theta = []
    varrho = []
    for p in range(1, figure.ell):
        num = _vec_mul(_edge_vec(figure, p), apex_m1)
        den = _vec_mul(_edge_vec(figure, p + 1), apex)
        theta.append(_angle_between(f"theta_{p}", num, den, env))
        varrho.append(_angle_between(f"varrho_{p}", _edge_vec(figure, p + 1),
                                     _vec_neg(_edge_vec(figure, p)), env))
    eta1 = _angle_between("eta_1", _vec_mul(_edge_vec(figure, q), apex_m1),
                          _vec_neg(apex), env)
    eta2 = _angle_between("eta_2", _vec_neg(apex_m1),
                          _vec_mul(_edge_vec(figure, q + 1), apex), env)
    psi = tuple(min(t.value, r.value) for t, r in zip(theta, varrho))
    return AngleProfile(tuple(theta), eta1, eta2, tuple(varrho), psi)


# ---------------------------------------------------------------------------
# Diophantine data at a degenerate corner
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiophantineParams:
    """The quantities governing Z_j = W_k collisions at a zero corner.

    alpha, beta are the distances |Z_0 - z_p|, |W_0 - z_p|; lambda, mu the
    end-map ratios; x = -log(lambda), y = -log(mu), u = log(alpha/beta).
    ``iota`` is the unit vector along which both point families approach
    z_p (recorded for diagnostics).
    """

    p: int
    alpha: float
    beta: float
    lam: float
    mu: float
    x: float
    y: float
    u: float
    iota: complex
    xy_rational: bool | None      # decided only from exactness annotations
    ratio_xy: Fraction | None     # the exact x/y when rational

    def margin(self, j: int, k: int) -> float:
        """Float value of u - j*x + k*y (no cancellation control)."""
        return self.u - j * self.x + k * self.y

    def as_dict(self) -> dict:
        return {
            "p": self.p, "alpha": self.alpha, "beta": self.beta,
            "lambda": self.lam, "mu": self.mu,
            "x": self.x, "y": self.y, "u": self.u,
            "iota": [self.iota.real, self.iota.imag],
            "xy_rational": self.xy_rational,
            "ratio_xy": None if self.ratio_xy is None else str(self.ratio_xy),
        }


def _xy_rationality(figure: BasicFigure) -> tuple[bool | None, Fraction | None]:
    fam = figure.family
    if fam is not None and getattr(fam, "xy_ratio_rational", None) is not None:
        return fam.xy_ratio_rational, getattr(fam, "xy_ratio", None)
    lr = figure.log_ratio
    if lr is not None and isinstance(lr.exponent_first, Fraction) \
            and isinstance(lr.exponent_last, Fraction):
        return True, lr.exponent_last / lr.exponent_first
    if figure.sym_vertices is not None:
        # x/y = 1 exactly when the two end edges have equal length
        e1 = figure.sym_edge(1)
        el = figure.sym_edge(figure.ell)
        diff = sp.expand(e1[0] ** 2 + e1[1] ** 2 - el[0] ** 2 - el[1] ** 2)
        if sym_sign(diff, figure.sym_env or None) == 0:
            return True, Fraction(1)
    return None, None


def diophantine_params(figure: BasicFigure, p: int,
                       profile: AngleProfile | None = None) -> DiophantineParams:
    """alpha, beta, lambda, mu, x, y, u for the corner z_p (theta_p must be 0)."""
    if not 1 <= p <= figure.ell - 1:
        raise ValueError(f"corner index p={p} out of range")
    prof = profile if profile is not None else angle_profile(figure)
    corner = prof.theta[p - 1]
    if corner.status == POSITIVE:
        raise AnglePositive(f"theta_{p} > 0; no Diophantine reduction applies")
    if corner.status != ZERO:
        raise UnresolvedAngle(f"theta_{p} could not be certified zero")

    r = figure.ratios
    lam = r[-1]
    mu = r[0]
    alpha = r[p - 1] * abs(1.0 - figure.apex)
    beta = r[p] * abs(figure.apex)
    z0 = figure.maps[p - 1](figure.apex)
    iota = (z0 - figure.vertices[p]) / abs(z0 - figure.vertices[p])
    rational, ratio = _xy_rationality(figure)
    return DiophantineParams(
        p=p, alpha=alpha, beta=beta, lam=lam, mu=mu,
        x=-math.log(lam), y=-math.log(mu), u=math.log(alpha) - math.log(beta),
        iota=iota, xy_rational=rational, ratio_xy=ratio)


# ---------------------------------------------------------------------------
# verdicts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    """Outcome of a condition check, with its certificate and scan data.

    ``witnesses`` are (j, k) pairs with the log of the tested ratio; the
    estimated constant stands in for the M/C of the bounded statements and
    ``upsilon`` for the straddle-comparison constant (both labelled
    non-rigorous — they come from finite scans and a law-of-sines
    heuristic, not from proofs).
    """

    status: str
    kind: str                     # "W" or "Q"
    p: int | None = None
    t: float | None = None
    bound: int | None = None
    log_margin_min: float | None = None
    log_constant: float | None = None
    upsilon: float | None = None
    witnesses: tuple[dict, ...] = ()
    checkpoints: tuple[float, ...] = ()
    detail: str = ""

    @property
    def constant(self) -> float | None:
        if self.log_constant is None:
            return None
        return math.exp(min(self.log_constant, 700.0))

    def as_dict(self) -> dict:
        return {
            "status": self.status, "kind": self.kind, "p": self.p, "t": self.t,
            "bound": self.bound, "log_margin_min": self.log_margin_min,
            "log_constant": self.log_constant, "constant": self.constant,
            "upsilon": self.upsilon,
            "witnesses": [dict(w) for w in self.witnesses],
            "checkpoints": list(self.checkpoints),
            "detail": self.detail,
        }


def _upsilon_estimate(prof: AngleProfile) -> float | None:
    """Non-rigorous stand-in for the straddling-pair comparison constant.

    The law-of-sines step bounds |Z_j - W_k| by csc(eta_0) times the
    straddling distance; we report that factor computed from the float
    angles.  It is an estimate, not a certificate.
    """
    e0 = prof.eta0
    if e0 <= 0.0 or e0 >= math.pi:
        return None
    return 1.0 / math.sin(e0)


def _float_log_margin(params: DiophantineParams) -> Callable[[int, int], tuple[float, float]]:
    u, x, y = params.u, params.x, params.y

    def bracket(j: int, k: int) -> tuple[float, float]:
        g = u - j * x + k * y
        err = 4.0 * _EPS * max(abs(u), j * x, k * y, 1.0)
        a = abs(g)
        if a <= err:
            return (-math.inf, math.log(err) if err > 0 else -math.inf)
        return (math.log(a - err), math.log(a + err))

    return bracket


def _margin_source(figure: BasicFigure, params: DiophantineParams):
    fam = figure.family
    if fam is not None and hasattr(fam, "log_margin"):
        return fam.log_margin, True
    return _float_log_margin(params), False


def _family_records(figure: BasicFigure, kind: str, p: int, exponent: float):
    """Structured witness records from a family annotation, if present.

    ``exponent`` is the decay rate multiplying j in the numerator of the
    tested ratio ((t-1)x for Q, roughly (s-1)x for W).  Returns
    (records, growing) where growing is True/False when the family module
    certified the trend along its witness schedule, None when it has no
    schedule to offer.
    """
    fam = figure.family
    if fam is None or not hasattr(fam, "condition_records"):
        return (), None
    rec = fam.condition_records(kind=kind, p=p, exponent=exponent)
    if rec is None:
        return (), None
    return tuple(rec.get("records", ())), rec.get("growing")


def _diagonal_scan(params: DiophantineParams, N: int, numerator_log, margin_bracket):
    """Max of the tested ratio near the minimising diagonal, per j.

    Returns (j values, per-j best log-ratio, per-j (k, lo, hi) data,
    undecided count).  ``numerator_log(j, k)`` gives the log-numerator;
    the denominator is |u - j x + k y| via ``margin_bracket``.
    """
    u, x, y = params.u, params.x, params.y
    ln_best = np.full(N + 1, -math.inf)
    best_k = np.zeros(N + 1, dtype=np.int64)
    undecided = 0
    lo_margin_min = math.inf
    for j in range(N + 1):
        k_star = int(round((j * x - u) / y))
        ks = {min(max(k, 0), N) for k in range(k_star - 3, k_star + 4)}
        ks.update((0, 1, 2, 3))
        val = -math.inf
        kv = 0
        for k in sorted(ks):
            lo, hi = margin_bracket(j, k)
            if lo < math.log(1e-300):
                if hi > math.log(1e-300):
                    undecided += 1
                    continue
            lo_margin_min = min(lo_margin_min, lo)
            cand = numerator_log(j, k) - lo          # upper value of the ratio
            if cand > val:
                val = cand
                kv = k
        ln_best[j] = val
        best_k[j] = kv
    return ln_best, best_k, undecided, lo_margin_min


def _records_of(ln_best: np.ndarray, best_k: np.ndarray) -> list[dict]:
    recs = []
    cur = -math.inf
    for j, v in enumerate(ln_best):
        if v > cur:
            cur = v
            recs.append({"j": int(j), "k": int(best_k[j]), "ln_ratio": float(v)})
    return recs


def _checkpoint_trend(ln_best: np.ndarray) -> tuple[str, tuple[float, ...]]:
    """Classify the running supremum over the last three doublings."""
    N = len(ln_best) - 1
    if N < 8:
        return UNKNOWN, ()
    marks = [N // 8, N // 4, N // 2, N]
    sups = []
    for m in marks:
        sups.append(float(np.max(ln_best[: m + 1])))
    d1 = sups[-2] - sups[-3]
    d2 = sups[-1] - sups[-2]
    if abs(d1) < _TREND_TOL and abs(d2) < _TREND_TOL:
        return "stable", tuple(sups)
    if d1 > _TREND_TOL and d2 > _TREND_TOL:
        return "growing", tuple(sups)
    return "tie", tuple(sups)


def _window_envelope(ln_best: np.ndarray) -> tuple[str, tuple[float, ...]]:
    """Per-doubling-window maxima (little-o decay detector)."""
    N = len(ln_best) - 1
    if N < 8:
        return UNKNOWN, ()
    w = [float(np.max(ln_best[N // 8 + 1: N // 4 + 1])),
         float(np.max(ln_best[N // 4 + 1: N // 2 + 1])),
         float(np.max(ln_best[N // 2 + 1: N + 1]))]
    if w[1] < w[0] - _TREND_TOL and w[2] < w[1] - _TREND_TOL:
        return "decaying", tuple(w)
    if w[1] > w[0] + _TREND_TOL and w[2] > w[1] + _TREND_TOL:
        return "growing", tuple(w)
    return "tie", tuple(w)


def check_W(figure: BasicFigure, p: int, s: float, N: int = 4096,
            profile: AngleProfile | None = None) -> Verdict:
    """Evidence for Condition W_p: (lambda^j + mu^k)^s = o(|alpha lambda^j - beta mu^k|).

    A positive corner angle is an analytic certificate.  At a zero corner
    the scan walks the minimising diagonal of the (j, k) grid; the
    little-o statement predicts the per-doubling-window maxima of the
    ratio decay, and a certified growing witness subsequence refutes it.
    """
    prof = profile if profile is not None else angle_profile(figure)
    corner = prof.theta[p - 1]
    if corner.status == UNRESOLVED:
        raise UnresolvedAngle(f"theta_{p} unresolved; cannot check W_{p}")
    if corner.status == POSITIVE:
        return Verdict(HOLDS_ANALYTIC, "W", p=p, bound=0,
                       upsilon=_upsilon_estimate(prof),
                       detail=f"theta_{p} > 0; Hoelder bound with csc(psi_{p}) applies")

    params = diophantine_params(figure, p, prof)
    bracket, exact = _margin_source(figure, params)
    x, y, lb = params.x, params.y, math.log(params.beta)

    def numerator_log(j: int, k: int) -> float:
        # log of (lambda^j + mu^k)^s / (beta * mu^k), the margin-free part
        return s * np.logaddexp(-j * x, -k * y) + k * y - lb

    ln_best, best_k, undecided, lo_margin = _diagonal_scan(params, N, numerator_log, bracket)
    records = _records_of(ln_best, best_k)
    fam_records, fam_growing = _family_records(figure, "W", p, (s - 1.0) * x)
    env_trend, windows = _window_envelope(ln_best)
    ups = _upsilon_estimate(prof)

    if fam_growing is True and len(fam_records) >= 3:
        return Verdict(EVIDENCE_AGAINST, "W", p=p, bound=N,
                       log_margin_min=lo_margin, log_constant=float(np.max(ln_best)),
                       upsilon=ups, witnesses=fam_records, checkpoints=windows,
                       detail="ratio grows along the constructed witness schedule")
    if undecided:
        return Verdict(UNKNOWN, "W", p=p, bound=N, log_margin_min=lo_margin,
                       upsilon=ups, witnesses=tuple(records[-3:]),
                       checkpoints=windows,
                       detail=f"{undecided} margins were numerically undecidable")
    if env_trend == "decaying" and fam_growing is not True:
        return Verdict(EVIDENCE_FOR, "W", p=p, bound=N, log_margin_min=lo_margin,
                       log_constant=float(np.max(ln_best)), upsilon=ups,
                       witnesses=tuple(records[-3:]), checkpoints=windows,
                       detail="window maxima of the ratio decay over the last doublings")
    if env_trend == "growing":
        late = [r for r in records if r["j"] > len(ln_best) // 8]
        if len(late) >= 3:
            return Verdict(EVIDENCE_AGAINST, "W", p=p, bound=N,
                           log_margin_min=lo_margin,
                           log_constant=float(np.max(ln_best)), upsilon=ups,
                           witnesses=tuple(late), checkpoints=windows,
                           detail="growing record subsequence in the scan")
    return Verdict(UNKNOWN, "W", p=p, bound=N, log_margin_min=lo_margin,
                   log_constant=float(np.max(ln_best)), upsilon=ups,
                   witnesses=tuple(records[-3:]), checkpoints=windows,
                   detail="no stable trend over the scanned doublings")


def check_Q(figure: BasicFigure, p: int, t: float, N: int = 4096,
            profile: AngleProfile | None = None) -> Verdict:
    """Evidence for Condition Q_p^t: e^{-j(t-1)x} <= M |u - jx + ky|.

    Positive corner angle: analytic.  t = 1 at a zero corner: decided by
    exact rationality of x/y when the figure carries that annotation.
    Otherwise the scan tracks M_N = max of the tested ratio over doublings
    of the bound.
    """
    if t < 1.0:
        raise ValueError("t must be >= 1")
    prof = profile if profile is not None else angle_profile(figure)
    corner = prof.theta[p - 1]
    if corner.status == UNRESOLVED:
        raise UnresolvedAngle(f"theta_{p} unresolved; cannot check Q_{p}^{t}")
    if corner.status == POSITIVE:
        return Verdict(HOLDS_ANALYTIC, "Q", p=p, t=t, bound=0,
                       upsilon=_upsilon_estimate(prof),
                       detail=f"theta_{p} > 0; law-of-sines bound applies for every t >= 1")

    params = diophantine_params(figure, p, prof)
    bracket, exact = _margin_source(figure, params)
    x = params.x
    ups = _upsilon_estimate(prof)

    def numerator_log(j: int, k: int) -> float:
        return -j * (t - 1.0) * x

    ln_best, best_k, undecided, lo_margin = _diagonal_scan(params, N, numerator_log, bracket)
    records = _records_of(ln_best, best_k)
    sup = float(np.max(ln_best))

    if t == 1.0:
        if params.xy_rational is True:
            return Verdict(HOLDS_RATIONAL_RATIO, "Q", p=p, t=t, bound=N,
                           log_margin_min=lo_margin, log_constant=sup, upsilon=ups,
                           witnesses=tuple(records[-3:]),
                           detail="x/y exactly rational; the approximation set is discrete")
        if params.xy_rational is False:
            return Verdict(EVIDENCE_AGAINST, "Q", p=p, t=t, bound=N,
                           log_margin_min=lo_margin, log_constant=sup, upsilon=ups,
                           witnesses=tuple(records[-3:]) or tuple(records),
                           detail="x/y exactly irrational; j*x - k*y approximates u "
                                  "arbitrarily well (density)")
        # fall through to the scan when rationality is unannotated

    fam_records, fam_growing = _family_records(figure, "Q", p, (t - 1.0) * x)
    if fam_growing is True and len(fam_records) >= 3:
        return Verdict(EVIDENCE_AGAINST, "Q", p=p, t=t, bound=N,
                       log_margin_min=lo_margin, log_constant=sup, upsilon=ups,
                       witnesses=fam_records,
                       detail="ratio grows along the constructed witness schedule")
    if undecided:
        return Verdict(UNKNOWN, "Q", p=p, t=t, bound=N, log_margin_min=lo_margin,
                       upsilon=ups, witnesses=tuple(records[-3:]),
                       detail=f"{undecided} margins were numerically undecidable")
    trend, sups = _checkpoint_trend(ln_best)
    if trend == "stable" and fam_growing is not True:
        return Verdict(EVIDENCE_FOR, "Q", p=p, t=t, bound=N,
                       log_margin_min=lo_margin, log_constant=sup, upsilon=ups,
                       witnesses=tuple(records[-3:]), checkpoints=sups,
                       detail="M_N stable over the last doublings of the bound")
    if trend == "growing":
        late = [r for r in records if r["j"] > len(ln_best) // 8]
        if len(late) >= 3:
            return Verdict(EVIDENCE_AGAINST, "Q", p=p, t=t, bound=N,
                           log_margin_min=lo_margin, log_constant=sup, upsilon=ups,
                           witnesses=tuple(late), checkpoints=sups,
                           detail="M_N grows across doublings of the bound")
    return Verdict(UNKNOWN, "Q", p=p, t=t, bound=N, log_margin_min=lo_margin,
                   log_constant=sup, upsilon=ups, witnesses=tuple(records[-3:]),
                   checkpoints=sups, detail="no stable trend over the scanned doublings")


# ---------------------------------------------------------------------------
# aggregation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GlobalVerdict:
    status: str
    weakest_p: int | None
    verdicts: tuple[Verdict, ...]
    implications: tuple[str, ...]

    def as_dict(self) -> dict:
        return {
            "status": self.status,
            "weakest_p": self.weakest_p,
            "verdicts": [v.as_dict() for v in self.verdicts],
            "implications": list(self.implications),
        }


def global_verdict(figure: BasicFigure, verdicts: Sequence[Verdict],
                   s: float | None = None) -> GlobalVerdict:
    """Conjunction over corners with weakest-certificate propagation.

    Also emits the cross implications: W at every corner supports the arc
    being an s-quasi-arc, and Q^t at every corner for some t < s supports
    f being a Whitney function.
    """
    if not verdicts:
        raise ValueError("no verdicts to aggregate")
    weakest = min(verdicts, key=lambda v: STRENGTH[v.status])
    supported = {HOLDS_ANALYTIC, HOLDS_RATIONAL_RATIO, EVIDENCE_FOR}

    implications: list[str] = []
    w_all = [v for v in verdicts if v.kind == "W"]
    if w_all and all(v.status in supported for v in w_all):
        analytic = all(v.status == HOLDS_ANALYTIC for v in w_all)
        grade = "analytically" if analytic else "by bounded evidence"
        implications.append(
            f"W supported at every corner {grade}: f is a Whitney function, "
            f"hence the arc is an s-quasi-arc (s={s if s is not None else 'dim'})")
    q_ts = {}
    for v in verdicts:
        if v.kind == "Q" and v.t is not None:
            q_ts.setdefault(v.t, []).append(v)
    for t in sorted(q_ts):
        group = q_ts[t]
        if s is not None and t < s and all(v.status in supported for v in group):
            implications.append(
                f"Q^t supported at every corner for t={t} < s={s}: "
                f"f is a Whitney function")

    return GlobalVerdict(weakest.status, weakest.p, tuple(verdicts),
                         tuple(implications))


def check_t_monotonicity(verdicts: Sequence[Verdict]) -> list[str]:
    """Consistency: a supported verdict at t must not weaken at larger t.

    Returns human-readable violation messages (empty = consistent).
    """
    supported = {HOLDS_ANALYTIC, HOLDS_RATIONAL_RATIO, EVIDENCE_FOR}
    by_p: dict[int | None, list[Verdict]] = {}
    for v in verdicts:
        if v.kind == "Q" and v.t is not None:
            by_p.setdefault(v.p, []).append(v)
    out = []
    for p, group in by_p.items():
        group = sorted(group, key=lambda v: v.t)
        for lo, hi in zip(group, group[1:]):
            if lo.status in supported and hi.status == EVIDENCE_AGAINST:
                out.append(f"p={p}: t={lo.t} is supported but t={hi.t} has "
                           f"evidence against (monotonicity violated)")
    return out


# ---------------------------------------------------------------------------
# empirical estimators
# ---------------------------------------------------------------------------


def _straddle_indices(figure: BasicFigure, depth: int,
                      profile: AngleProfile) -> list[tuple[int, int]]:
    """Vertex-index pairs straddling each degenerate corner.

    At a zero corner the suprema are carried by pairs near the points
    Z_j = S_p S_l^j(z_q) and W_k = S_{p+1} S_1^k(z_q); both are exact grid
    vertices once depth >= j + 2.
    """
    ell = figure.ell
    q = figure.q
    pairs: list[tuple[int, int]] = []
    for p in profile.zero_corners():
        zs, ws = [], []
        for j in range(depth - 1):
            # g((p - (1 - q/l)/l^{j+1}) / 1): index p*l^{m-1} - (l-q)*l^{m-j-2}
            zs.append(p * ell ** (depth - 1) - (ell - q) * ell ** (depth - j - 2))
            ws.append(p * ell ** (depth - 1) + q * ell ** (depth - j - 2))
        for a in zs:
            for b in ws:
                pairs.append((a, b))
        corner = p * ell ** (depth - 1)
        pairs.append((corner - 1, corner + 1))
        for a in zs + ws:
            pairs.append((min(a, corner), max(a, corner)))
    return pairs


def _select_pairs(n: int, straddle: list[tuple[int, int]], cap: int,
                  seed: int) -> tuple[np.ndarray, np.ndarray]:
    total = n * (n - 1) // 2
    if total <= cap:
        i, j = np.triu_indices(n, k=1)
        return i.astype(np.int64), j.astype(np.int64)
    stride = max(1, int(math.ceil(n / math.isqrt(2 * cap))))
    base = np.arange(0, n, stride, dtype=np.int64)
    if base[-1] != n - 1:
        base = np.append(base, n - 1)
    bi, bj = np.triu_indices(len(base), k=1)
    ii = base[bi]
    jj = base[bj]
    rng = np.random.default_rng(seed)
    extra = max(0, cap - len(ii))
    if extra:
        ri = rng.integers(0, n, size=extra, dtype=np.int64)
        rj = rng.integers(0, n, size=extra, dtype=np.int64)
        keep = ri != rj
        ii = np.concatenate([ii, np.minimum(ri[keep], rj[keep])])
        jj = np.concatenate([jj, np.maximum(ri[keep], rj[keep])])
    if straddle:
        si = np.array([a for a, _ in straddle], dtype=np.int64)
        sj = np.array([b for _, b in straddle], dtype=np.int64)
        ok = (si >= 0) & (sj <= n - 1) & (si < sj)
        ii = np.concatenate([ii, si[ok]])
        jj = np.concatenate([jj, sj[ok]])
    return ii, jj


class _RangeMinMax:
    """Sparse-table range min/max over a float array (O(1) queries)."""

    def __init__(self, values: np.ndarray):
        self.mins = [values.copy()]
        self.maxs = [values.copy()]
        span = 1
        while 2 * span <= len(values):
            pm = self.mins[-1]
            px = self.maxs[-1]
            self.mins.append(np.minimum(pm[:-span], pm[span:]))
            self.maxs.append(np.maximum(px[:-span], px[span:]))
            span *= 2

    def query(self, i: np.ndarray, j: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        width = j - i + 1
        level = np.frexp(width.astype(np.float64))[1] - 1  # floor(log2(width))
        lo = np.empty(len(i))
        hi = np.empty(len(i))
        for lev in np.unique(level):
            m = level == lev
            span = 1 << int(lev)
            a, b = i[m], j[m] - span + 1
            lo[m] = np.minimum(self.mins[lev][a], self.mins[lev][b])
            hi[m] = np.maximum(self.maxs[lev][a], self.maxs[lev][b])
        return lo, hi


@dataclass(frozen=True)
class QuasiScan:
    """Suprema estimates of L(x, y) = |subarc(x, y)|^t / |x - y| at one depth."""

    t: float
    depth: int
    refine: int
    sup_lower: float
    sup_upper: float
    argmax: tuple[int, int]
    pairs: int
    straddle_pairs: int

    def as_dict(self) -> dict:
        return {"t": self.t, "depth": self.depth, "refine": self.refine,
                "sup_lower": self.sup_lower, "sup_upper": self.sup_upper,
                "argmax": list(self.argmax), "pairs": self.pairs,
                "straddle_pairs": self.straddle_pairs}


def empirical_quasi(obj, t: float, depth: int, refine: int = 2, *,
                    cap: int = 2_000_000, seed: int = 0,
                    profile: AngleProfile | None = None,
                    top: int = 64) -> QuasiScan:
    """Scan depth-k vertex pairs for the supremum of |subarc|^t / distance.

    Exhaustive when the pair count fits the cap, otherwise a deterministic
    stride subset plus seeded samples plus all straddling pairs around each
    degenerate corner (those carry the supremum).  Subarc diameters are
    bracketed from vertex bounding boxes, then the leading candidates are
    re-bracketed rigorously at ``refine`` extra levels.
    """
    grid = vertex_grid(obj, depth)
    n = len(grid)
    straddle: list[tuple[int, int]] = []
    if isinstance(obj, BasicFigure):
        prof = profile if profile is not None else angle_profile(obj)
        straddle = _straddle_indices(obj, depth, prof)
    ii, jj = _select_pairs(n, straddle, cap, seed)

    re_t = _RangeMinMax(grid.real)
    im_t = _RangeMinMax(grid.imag)
    re_lo, re_hi = re_t.query(ii, jj)
    im_lo, im_hi = im_t.query(ii, jj)
    w = re_hi - re_lo
    h = im_hi - im_lo
    inflate = 2.0 * (max(_ratios_of(obj)) ** depth) * attractor_diameter_upper(obj)

    dist = np.abs(grid[ii] - grid[jj])
    diam_lo = np.maximum(w, h)
    diam_hi = np.hypot(w, h) + inflate
    low = diam_lo ** t / dist
    up = diam_hi ** t / dist

    candidates = np.concatenate([np.argsort(-up, kind="stable")[:top],
                                 np.argsort(-low, kind="stable")[:top]])
    for idx in dict.fromkeys(int(c) for c in candidates):
        a, b = int(ii[idx]), int(jj[idx])
        d_lo, d_hi = subarc_diameter(obj, depth, a, b, refine=refine)
        low[idx] = max(low[idx], d_lo ** t / dist[idx])
        up[idx] = min(up[idx], d_hi ** t / dist[idx])

    best = int(np.argmax(low))
    return QuasiScan(t=t, depth=depth, refine=refine,
                     sup_lower=float(np.max(low)), sup_upper=float(np.max(up)),
                     argmax=(int(ii[best]), int(jj[best])),
                     pairs=int(len(ii)), straddle_pairs=len(straddle))


def _ratios_of(obj) -> tuple[float, ...]:
    if isinstance(obj, BasicFigure):
        return obj.ratios
    return as_system(obj).ratios


@dataclass(frozen=True)
class ModulusBin:
    log2_lo: float
    log2_hi: float
    pairs: int
    sup_ratio: float

    def as_dict(self) -> dict:
        return {"log2_lo": self.log2_lo, "log2_hi": self.log2_hi,
                "pairs": self.pairs, "sup_ratio": self.sup_ratio}


@dataclass(frozen=True)
class ModulusTable:
    """Per-scale suprema of |f(z_i) - f(z_j)| / |z_i - z_j|.

    The Whitney property predicts the suprema tend to 0 with the scale;
    a Lipschitz f (straight segment) keeps them pinned near 1.
    """

    s: float
    depth: int
    bins: tuple[ModulusBin, ...]

    def sup_ratios(self) -> tuple[float, ...]:
        return tuple(b.sup_ratio for b in self.bins if b.pairs)

    def decay_factor(self) -> float:
        """Smallest-scale nonempty bin supremum over the largest-scale one."""
        vals = [b.sup_ratio for b in self.bins if b.pairs]
        if len(vals) < 2 or vals[-1] == 0.0:
            return math.nan
        return vals[0] / vals[-1]

    def as_dict(self) -> dict:
        return {"s": self.s, "depth": self.depth,
                "bins": [b.as_dict() for b in self.bins]}


def empirical_whitney_modulus(obj, s: float, depth: int, bins: int = 12, *,
                              cap: int = 2_000_000, seed: int = 0,
                              profile: AngleProfile | None = None) -> ModulusTable:
    """Bin |f(x)-f(y)|/|x-y| over depth-k vertex pairs by log2 of the distance."""
    from .spectrum import f_vertices

    grid = vertex_grid(obj, depth)
    fv = f_vertices(obj, depth, s)
    n = len(grid)
    straddle: list[tuple[int, int]] = []
    if isinstance(obj, BasicFigure):
        prof = profile if profile is not None else angle_profile(obj)
        straddle = _straddle_indices(obj, depth, prof)
    ii, jj = _select_pairs(n, straddle, cap, seed)

    dist = np.abs(grid[ii] - grid[jj])
    ratio = np.abs(fv[ii] - fv[jj]) / dist
    logd = np.log2(dist)
    lo = float(np.min(logd))
    hi = float(np.max(logd))
    if hi <= lo:
        hi = lo + 1.0
    edges = np.linspace(lo, hi, bins + 1)
    which = np.clip(np.digitize(logd, edges) - 1, 0, bins - 1)
    sup = np.zeros(bins)
    np.maximum.at(sup, which, ratio)
    counts = np.bincount(which, minlength=bins)
    rows = tuple(
        ModulusBin(float(edges[b]), float(edges[b + 1]), int(counts[b]), float(sup[b]))
        for b in range(bins))
    return ModulusTable(s=s, depth=depth, bins=rows)
