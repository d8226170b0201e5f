"""A one-parameter family of self-similar arcs with one flat corner.

For a parameter ``tau`` slightly above 1, the seven-vertex basic figure built
here has a single zero corner angle (at the midpoint vertex D) whose
logarithmic Diophantine data is exactly known::

    x = zeta,   y = zeta / tau,   u = zeta / nu,   zeta = log(15/7),

with ``nu = tau - (tau - 1)/sqrt(2)`` for rational ``tau`` and ``nu = tau``
(so ``u = y``) for irrational ``tau``.  Because everything reduces to how
well integer multiples of ``tau`` approach integers, the quasi-arc exponents
of the attractor can be steered by choosing ``tau`` with prescribed
approximation behaviour — the schedules from :mod:`quasiarc.dio`.

:func:`build_omega_tau` constructs and validates the figure;
:func:`classify` runs the number-theoretic scan (``j_a_evidence``) and the
geometric scan (``check_Q``) side by side and flags disagreements.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import sympy as sp

from .conditions import ZERO, DiophantineParams, Verdict, angle_profile, check_Q
from .dio import (
    DyadicStream,
    IrrationalRequired,
    JaReport,
    OverflowPolicyError,
    QuadSurd,
    _certified_greater,
    _floor_log2,
    _logq_summary,
    _witness_logq,
    j_a_evidence,
    log_fraction_bracket,
)
from .geom import BasicFigure, LogRatioStructure, build_basic_figure
from .intervals import Interval, _down, _up

__all__ = [
    "TauOutOfRange",
    "OmegaTau",
    "FamilyClassification",
    "build_omega_tau",
    "family_params",
    "classify",
    "ZETA",
]


class TauOutOfRange(ValueError):
    """tau must lie in (1, 1 + 2**-8): above 1, below the geometric break."""


ZETA_LO, ZETA_HI = log_fraction_bracket(Fraction(15, 7))
ZETA = float((ZETA_LO + ZETA_HI) / 2)

_TAU_MAX = Fraction(1) + Fraction(1, 256)
_GEOM_PREC_BITS = 768  # dyadic truncation precision carried into the geometry


def _tau_bracket(tau) -> tuple[Fraction, Fraction]:
    if isinstance(tau, int):
        return Fraction(tau), Fraction(tau)
    if isinstance(tau, Fraction):
        return tau, tau
    if isinstance(tau, QuadSurd):
        return tau.bracket()
    if isinstance(tau, DyadicStream):
        i = tau.max_materialisable()
        lo = tau.truncation(i)
        # Cap the tail width at 2**-4096: wide enough margins stay certified,
        # and it keeps downstream Fraction arithmetic off megabit denominators.
        _, hi_log2 = tau.tail_log2_bounds(i)
        exp = 4096 if hi_log2 is None else min(4096, max(1, -int(hi_log2)))
        return lo, lo + Fraction(1, 1 << exp)
    raise TypeError(f"unsupported tau type: {type(tau).__name__}")


def _tau_is_rational(tau) -> bool:
    if isinstance(tau, (int, Fraction)):
        return True
    if isinstance(tau, QuadSurd):
        return tau.is_rational
    return False


def _ln_bracket(lo: Fraction, hi: Fraction) -> tuple[float, float]:
    """Float bracket of ln over a positive Fraction interval.

    Falls back to integer log2 bounds when the values underflow floats;
    (-inf, ln hi) when the interval is not certified positive.
    """
    if hi <= 0:
        return (-math.inf, -math.inf)
    e_hi = _floor_log2(hi)
    if lo <= 0:
        top = _up((e_hi + 1) * _LN2_F_HI) if e_hi < -900 else _up(math.log(float(hi)))
        return (-math.inf, top)
    e_lo = _floor_log2(lo)
    if e_lo > -900 and e_hi < 900:
        return (_down(math.log(_down(float(lo)))), _up(math.log(_up(float(hi)))))
    bot = _down(e_lo * (_LN2_F_HI if e_lo < 0 else _LN2_F_LO))
    top = _up((e_hi + 1) * (_LN2_F_LO if e_hi < -1 else _LN2_F_HI))
    return (bot, top)


_LN2_F_LO = _down(math.log(2.0))
_LN2_F_HI = _up(math.log(2.0))


def _inv_nu_surd(tau: Fraction) -> QuadSurd:
    """1/nu = (tau + (tau-1)/sqrt(2)) / (tau**2 - (tau-1)**2/2), exactly."""
    d = tau * tau - (tau - 1) ** 2 / 2
    return QuadSurd(tau / d, (tau - 1) / (2 * d))


class OmegaTau:
    """A built family instance plus the exact Diophantine annotations.

    Also serves as the ``figure.family`` hook consumed by the conditions
    module: ``xy_ratio_rational``/``xy_ratio`` decide rationality of x/y,
    ``log_margin`` brackets ln|u - jx + ky| exactly, ``margins_nonzero``
    certifies the arc criterion, and ``condition_records`` reports certified
    trends along the stream's witness schedule.
    """

    def __init__(self, tau) -> None:
        self.tau = tau
        self.rational = _tau_is_rational(tau)
        t_lo, t_hi = _tau_bracket(tau)
        self.tau_lo, self.tau_hi = t_lo, t_hi
        self.x = float((ZETA_LO + ZETA_HI) / 2)
        self.y = float((ZETA_LO / t_hi + ZETA_HI / t_lo) / 2)
        if self.rational:
            inv_nu = _inv_nu_surd(Fraction(tau))
            lo, hi = inv_nu.bracket()
            self.inv_nu: QuadSurd | None = inv_nu
            self.u = float((ZETA_LO * lo + ZETA_HI * hi) / 2)
        else:
            self.inv_nu = None
            self.u = self.y
        self.figure: BasicFigure | None = None
        self.vertices: tuple[complex, ...] = ()

    # -- hook protocol ----------------------------------------------------

    @property
    def xy_ratio_rational(self) -> bool:
        return self.rational

    @property
    def xy_ratio(self) -> Fraction | None:
        return Fraction(self.tau) if self.rational else None

    @property
    def margins_nonzero(self) -> bool:
        # rational tau: u - jx + ky = zeta*(1/nu - j + k/tau) has the fixed
        # irrational part (tau-1)/(2 d) * sqrt(2) != 0.  irrational tau:
        # u = y, so the margin vanishes only if j*tau is an integer.
        return True

    def margin_fraction_bracket(self, j: int, k: int) -> tuple[Fraction, Fraction]:
        """Exact bracket of |u - jx + ky| / zeta (the zeta-free margin)."""
        if self.rational:
            tau = Fraction(self.tau)
            p = self.inv_nu + (Fraction(k, 1) / tau - j)
            lo, hi = p.bracket()
        elif isinstance(self.tau, QuadSurd):
            p = (k + 1) - self.tau * j
            b_lo, b_hi = p.bracket()
            lo, hi = (b_lo / self.tau_hi, b_hi / self.tau_lo)
        else:
            d_lo = j * self.tau_lo - (k + 1)
            d_hi = j * self.tau_hi - (k + 1)
            lo, hi = d_lo / self.tau_hi, d_hi / self.tau_lo
        if lo > hi:
            lo, hi = hi, lo
        if lo < 0 < hi:
            return Fraction(0), max(-lo, hi)
        a_lo, a_hi = sorted((abs(lo), abs(hi)))
        return a_lo, a_hi

    def log_margin(self, j: int, k: int) -> tuple[float, float]:
        """Certified float bracket of ln|u - jx + ky|."""
        # margins far above the float noise floor don't need exact arithmetic
        g = abs(self.u - j * self.x + k * self.y)
        err = 4.0 * sys.float_info.epsilon * max(self.u, j * self.x, k * self.y, 1.0)
        if g > max(1e-6, 1e6 * err):
            return (_down(math.log(g - err)), _up(math.log(g + err)))
        m_lo, m_hi = self.margin_fraction_bracket(j, k)
        return _ln_bracket(m_lo * ZETA_LO, m_hi * ZETA_HI)

    def condition_records(self, *, kind: str, p: int, exponent: float):
        """Certified ratio trend along the witness schedule of a stream tau.

        The tested ratio at witness j_i grows exactly when the schedule's
        q-value j*exp(a*j)*dist(j*tau, Z) shrinks, a = ``exponent``; growth
        is certified with the same exact log2 brackets the scans use.
        """
        if p != 3 or kind not in ("Q", "W") or exponent <= 0:
            return None
        if not isinstance(self.tau, DyadicStream):
            return None
        stream = self.tau
        if stream.terms < 3:
            try:
                stream = stream.extend(3 - stream.terms)
            except OverflowPolicyError:
                pass
        a = Fraction(exponent)
        pairs = []
        for w in stream.witnesses():
            lq = _witness_logq(stream, w, a)
            if lq is not None:
                pairs.append((w, lq))
        if len(pairs) < 2:
            return None
        descending = 0
        for (_, prev), (_, nxt) in zip(pairs, pairs[1:]):
            if _certified_greater(prev, nxt):
                descending += 1
            else:
                break
        growing: bool | None = None
        if descending == len(pairs) - 1 and len(pairs) >= 3:
            growing = True
        elif descending == 0 and _certified_greater(pairs[1][1], pairs[0][1]):
            growing = False
        records = []
        for w, lq in pairs:
            entry = {"j_log2": w.j_log2}
            entry.update(_logq_summary(lq))
            records.append(entry)
        return {"records": records, "growing": growing}

    def as_dict(self) -> dict:
        tau = self.tau
        if isinstance(tau, DyadicStream):
            tau_desc: Any = tau.as_dict()
        elif isinstance(tau, QuadSurd):
            tau_desc = {"a": [tau.a.numerator, tau.a.denominator],
                        "b": [tau.b.numerator, tau.b.denominator]}
        else:
            fr = Fraction(tau)
            tau_desc = [fr.numerator, fr.denominator]
        return {
            "tau": tau_desc,
            "tau_float": float(Interval(float(self.tau_lo), float(self.tau_hi)).mid),
            "rational": self.rational,
            "x": self.x, "y": self.y, "u": self.u,
            "vertices": [[v.real, v.imag] for v in self.vertices],
        }


def build_omega_tau(tau) -> OmegaTau:
    """Construct and validate the family figure for ``tau``.

    The seven vertices sit on the unit baseline with apex C above the
    midpoint D; the flat corner at D is certified zero exactly (both rays
    leave D at angle pi/2 - pi/18).  DyadicStream values enter the geometry
    as a high-precision truncation; classification keeps the exact stream.
    """
    t_lo, t_hi = _tau_bracket(tau)
    if not (1 < t_lo and t_hi < _TAU_MAX):
        raise TauOutOfRange(
            f"tau in ({float(t_lo)}, {float(t_hi)}) is outside (1, {float(_TAU_MAX)})"
        )
    omega = OmegaTau(tau)

    if isinstance(tau, DyadicStream):
        i = 0
        for n in tau.exponents:
            if n > _GEOM_PREC_BITS:
                break
            i += 1
        tau_geo = tau.truncation(i)
        tau_s: sp.Expr = sp.Rational(tau_geo.numerator, tau_geo.denominator)
        nu_s: sp.Expr = tau_s
    elif isinstance(tau, QuadSurd) and not tau.is_rational:
        tau_s = sp.Rational(tau.a) + sp.Rational(tau.b) * sp.sqrt(2)
        nu_s = tau_s
    else:
        fr = Fraction(tau)
        tau_s = sp.Rational(fr.numerator, fr.denominator)
        nu_s = tau_s - (tau_s - 1) / sp.sqrt(2)

    r = sp.Rational(7, 15)
    half = sp.Rational(1, 2)
    h = sp.tan(sp.pi / 18) / 2
    b_x = r ** (1 / tau_s)
    d_e = r ** (1 / nu_s) * h
    phi = sp.Rational(7, 18) * sp.pi
    sym_vertices = [
        (sp.Integer(0), sp.Integer(0)),
        (b_x, sp.Integer(0)),
        (half, h),
        (half, sp.Integer(0)),
        (half + d_e * sp.cos(phi), d_e * sp.sin(phi)),
        (sp.Rational(8, 15), sp.Integer(0)),
        (sp.Integer(1), sp.Integer(0)),
    ]
    verts = [complex(float(sp.N(a, 30)), float(sp.N(b, 30))) for a, b in sym_vertices]
    log_ratio = None
    if omega.rational:
        log_ratio = LogRatioStructure(base=Fraction(7, 15),
                                      exponent_first=Fraction(1) / Fraction(tau),
                                      exponent_last=Fraction(1))
    figure = build_basic_figure(
        verts, 2, sym_vertices=sym_vertices, log_ratio=log_ratio,
        family=omega, name=f"omega_tau[{float(t_lo):.9f}]",
    )

    prof = angle_profile(figure)
    flat = prof.theta[2]
    if flat.status != ZERO:
        raise ValueError(f"the corner at D failed its zero certification: {flat}")
    e_x, e_y = verts[4].real, verts[4].imag
    if not (0.5 < e_x < 8 / 15 and e_y > 0):
        raise ValueError("E does not project between D and F")
    omega.figure = figure
    omega.vertices = tuple(verts)
    return omega


def family_params(omega: OmegaTau) -> DiophantineParams:
    """Closed-form Diophantine data of the flat corner, for cross-checking.

    Independent of the geometric route: everything is produced from tau and
    the defining lengths, so agreement with ``diophantine_params(figure, 3)``
    validates both.
    """
    h = math.tan(math.pi / 18) / 2
    w = math.hypot(0.5, h)
    lam = 7 / 15
    mu = math.exp(-omega.y)
    alpha = h * w
    beta = h * w * math.exp(-omega.u)
    iota = complex(h, 0.5) / abs(complex(h, 0.5))
    return DiophantineParams(
        p=3, alpha=alpha, beta=beta, lam=lam, mu=mu,
        x=omega.x, y=omega.y, u=omega.u, iota=iota,
        xy_rational=omega.xy_ratio_rational, ratio_xy=omega.xy_ratio,
    )


@dataclass(frozen=True)
class FamilyClassification:
    """Paired verdicts for one (tau, t): number-theoretic and geometric."""

    tau_desc: str
    t: float
    bound: int
    number_verdict: str
    geometric_verdict: str
    consistent: bool | None
    ja: JaReport | None
    q: Verdict
    detail: str

    def as_dict(self) -> dict:
        return {
            "tau": self.tau_desc,
            "t": self.t,
            "bound": self.bound,
            "number_verdict": self.number_verdict,
            "geometric_verdict": self.geometric_verdict,
            "consistent": self.consistent,
            "j_a_report": self.ja.as_dict() if self.ja else None,
            "q_verdict": self.q.as_dict(),
            "detail": self.detail,
        }


def _tau_desc(tau) -> str:
    if isinstance(tau, DyadicStream):
        return f"stream[{tau.kind}, terms={tau.terms}]"
    if isinstance(tau, QuadSurd):
        return f"{tau.a} + {tau.b}*sqrt(2)"
    fr = Fraction(tau)
    return f"{fr.numerator}/{fr.denominator}"


def classify(tau, t: float, N: int = 4096) -> FamilyClassification:
    """Evidence for/against the attractor being a t-quasi-arc.

    Runs the pure number-theoretic scan of ``tau`` (rate ``(t-1)*zeta``) and
    the geometric condition scan on the built figure, and reports both with
    a consistency flag.  For ``t=1`` the answer is exact: it holds iff
    ``tau`` is rational.
    """
    if t < 1:
        raise ValueError("t must be at least 1")
    omega = build_omega_tau(tau)
    assert omega.figure is not None

    if t == 1.0:
        q = check_Q(omega.figure, 3, 1.0, N)
        number = q.status
        detail = ("tau is rational: x/y is rational and the margin set is discrete"
                  if omega.rational else
                  "tau is irrational: j*x - k*y comes arbitrarily close to u")
        return FamilyClassification(
            tau_desc=_tau_desc(tau), t=1.0, bound=N,
            number_verdict=number, geometric_verdict=q.status,
            consistent=True, ja=None, q=q, detail=detail,
        )

    if omega.rational:
        raise IrrationalRequired(
            "t > 1 classification needs an irrational tau; rational tau "
            "is settled at t = 1 already"
        )
    a = (t - 1.0) * ZETA
    ja = j_a_evidence(tau, a, N)
    q = check_Q(omega.figure, 3, t, N)
    for_set = {"EvidenceFor", "HoldsAnalytic", "HoldsRationalRatio"}
    n_for, n_against = ja.verdict in for_set, ja.verdict == "EvidenceAgainst"
    g_for, g_against = q.status in for_set, q.status == "EvidenceAgainst"
    if (n_for and g_against) or (n_against and g_for):
        consistent: bool | None = False
    elif ja.verdict == "Unknown" or q.status == "Unknown":
        consistent = None
    else:
        consistent = True
    detail = (f"number route {ja.verdict} at rate (t-1)*zeta = {a:.6f}; "
              f"geometric route {q.status} at bound {N}")
    return FamilyClassification(
        tau_desc=_tau_desc(tau), t=float(t), bound=N,
        number_verdict=ja.verdict, geometric_verdict=q.status,
        consistent=consistent, ja=ja, q=q, detail=detail,
    )
