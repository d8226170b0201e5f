"""Command line interface: spec ingestion, reports, SVG rendering.

Every subcommand emits one JSON report (stdout by default, ``--report`` to
write a file).  Reports are canonical — identical flags and seed give
byte-identical output.  Failures produce a machine-readable ``{"error":
...}`` report and a nonzero exit status: 2 usage, 3 invalid figure or spec,
4 computation refused (parameter out of range, bit budget, ...).
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
from fractions import Fraction

from . import reporting
from .arc import arc_check
from .conditions import (angle_profile, check_Q, check_t_monotonicity,
                         check_W, empirical_quasi, empirical_whitney_modulus,
                         global_verdict)
from .dio import (IrrationalRequired, OverflowPolicyError, tau_7_11,
                  tau_7_12, tau_7_13, tau_7_14)
from .family import TauOutOfRange, classify
from .figspec import SpecError, figure_from_spec, load_spec
from .geom import InvalidFigureError, validate_basic_figure
from .spectrum import (cell_measures, check_forget, check_lemma32_iii,
                       epsilon_sequence, f_vertices, hausdorff_dimension,
                       whitney_weights)
from .svg import figure_svg

_TAU_KINDS = {"7.11": tau_7_11, "7.12": tau_7_12,
              "7.13": tau_7_13, "7.14": tau_7_14}


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------


def _fraction(text: str, what: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise SpecError(f"{what} must be rational (p/q or decimal), "
                        f"got {text!r}") from exc


def parse_tau_text(text: str):
    """A tau specification: rational, decimal, or constructor call.

    Accepted forms: ``p/q``, a decimal literal (taken exactly), or
    ``KIND:key=value,...`` with KIND one of 7.11|7.12|7.13|7.14 and keys
    a0 (7.11/7.12 only, rational), nu, terms.
    """
    head, _, tail = text.partition(":")
    if head in _TAU_KINDS:
        kwargs: dict = {}
        if tail:
            for item in tail.split(","):
                key, eq, value = item.partition("=")
                if not eq:
                    raise SpecError(f"malformed tau parameter {item!r}")
                if key == "a0":
                    kwargs["a0"] = _fraction(value, "a0")
                elif key in ("nu", "terms"):
                    try:
                        kwargs[key] = int(value)
                    except ValueError as exc:
                        raise SpecError(f"{key} must be an integer") from exc
                else:
                    raise SpecError(f"unknown tau parameter {key!r} "
                                    "(allowed: a0, nu, terms)")
        ctor = _TAU_KINDS[head]
        a0 = kwargs.pop("a0", None)
        if head in ("7.11", "7.12"):
            if a0 is None:
                raise SpecError(f"{head} needs a0 (e.g. {head}:a0=1/739,nu=8)")
            return ctor(a0, **kwargs)
        if a0 is not None:
            raise SpecError(f"{head} takes no a0")
        return ctor(**kwargs)
    return _fraction(text, "tau")


def _common(args: argparse.Namespace, command: str, **bounds) -> dict:
    report = {"command": command, "seed": args.seed,
              "bounds": {k: v for k, v in bounds.items() if v is not None}}
    threads = os.environ.get("QUASIARC_THREADS")
    if threads:
        report["threads"] = threads
    return report


def _load_figure(args: argparse.Namespace):
    spec = load_spec(args.spec)
    fig = figure_from_spec(spec)
    return spec, fig


def _figure_block(spec, fig) -> dict:
    return {"name": fig.name, "ell": fig.ell, "apex": fig.q,
            "exact": spec.exact, "digest": reporting.digest(spec.raw)}


_ASSUMPTIONS = [
    "s-dimensional Hausdorff measure normalised to 1 on the attractor",
    "floats are IEEE-754 doubles; certified claims use directed rounding "
    "or exact arithmetic as labelled",
]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_validate(args: argparse.Namespace) -> tuple[int, dict]:
    spec = load_spec(args.spec)
    report, fig = validate_basic_figure(
        list(spec.vertices), spec.apex, sym_vertices=spec.sym_vertices,
        log_ratio=spec.log_ratio, name=spec.name)
    out = _common(args, "validate")
    out["figure"] = {"name": spec.name or "figure", "ell": len(spec.vertices) - 1,
                     "apex": spec.apex, "exact": spec.exact,
                     "digest": reporting.digest(spec.raw)}
    out["ok"] = report.ok
    out["validation"] = report.as_dict()
    return (0 if report.ok else 3), out


def cmd_render(args: argparse.Namespace) -> tuple[int, dict]:
    spec, fig = _load_figure(args)
    text, count = figure_svg(fig, args.depth)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text)
    out = _common(args, "render", depth=args.depth)
    out["figure"] = _figure_block(spec, fig)
    out["render"] = {"out": args.out, "vertices": count,
                     "svg_sha256": hashlib.sha256(text.encode()).hexdigest()}
    return 0, out


def cmd_dimension(args: argparse.Namespace) -> tuple[int, dict]:
    spec, fig = _load_figure(args)
    s = hausdorff_dimension(fig)
    out = _common(args, "dimension")
    out["figure"] = _figure_block(spec, fig)
    out["dimension"] = {"s": s, "ratios": list(fig.ratios),
                        "moran_residual": sum(r ** s for r in fig.ratios) - 1.0}
    return 0, out


def cmd_angles(args: argparse.Namespace) -> tuple[int, dict]:
    spec, fig = _load_figure(args)
    out = _common(args, "angles")
    out["figure"] = _figure_block(spec, fig)
    out["angles"] = angle_profile(fig).as_dict()
    return 0, out


def cmd_conditions(args: argparse.Namespace) -> tuple[int, dict]:
    spec, fig = _load_figure(args)
    s = hausdorff_dimension(fig)
    prof = angle_profile(fig)
    ts = args.t if args.t else [1.0, 2.0]
    ps = args.p if args.p else list(range(1, fig.ell))

    w_verdicts = [check_W(fig, p, s, args.bound) for p in ps]
    q_verdicts = [check_Q(fig, p, t, args.bound) for t in ts for p in ps]
    verdicts = w_verdicts + q_verdicts

    out = _common(args, "conditions", N=args.bound, depth=args.depth or None)
    out["figure"] = _figure_block(spec, fig)
    out["assumptions"] = _ASSUMPTIONS
    out["dimension"] = s
    out["angles"] = prof.as_dict()
    out["W"] = [v.as_dict() for v in w_verdicts]
    out["Q"] = [v.as_dict() for v in q_verdicts]
    out["global"] = global_verdict(fig, verdicts, s).as_dict()
    out["t_monotonicity_violations"] = check_t_monotonicity(q_verdicts)
    out["arc"] = arc_check(fig).as_dict()
    if args.depth:
        out["empirical"] = [
            empirical_quasi(fig, t, args.depth, seed=args.seed,
                            profile=prof).as_dict()
            for t in ts
        ]
    return 0, out


def cmd_family_classify(args: argparse.Namespace) -> tuple[int, dict]:
    tau = parse_tau_text(args.tau)
    cl = classify(tau, args.t, args.bound)
    out = _common(args, "family classify", N=args.bound)
    out["assumptions"] = _ASSUMPTIONS
    out["tau"] = args.tau
    out["t"] = args.t
    out["classification"] = cl.as_dict()
    return 0, out


def cmd_tau_construct(args: argparse.Namespace) -> tuple[int, dict]:
    stream = parse_tau_text(args.kind + (":" + args.params if args.params else ""))
    iv = stream.value_interval()
    out = _common(args, "tau construct")
    out["stream"] = stream.as_dict()
    out["value"] = {"float": float(stream), "interval": [iv.lo, iv.hi]}
    out["witnesses"] = [w.as_dict() for w in stream.witnesses()]
    return 0, out


def cmd_measure(args: argparse.Namespace) -> tuple[int, dict]:
    spec, fig = _load_figure(args)
    s = hausdorff_dimension(fig)
    depth = args.depth
    meas = cell_measures(fig, depth)
    fv = f_vertices(fig, depth)
    rows = [{"index": i, "f": float(v)} for i, v in enumerate(fv)]

    out = _common(args, "measure", depth=depth, levels=args.levels or None)
    out["figure"] = _figure_block(spec, fig)
    out["assumptions"] = _ASSUMPTIONS
    out["dimension"] = s
    out["measure"] = {
        "depth": depth,
        "cells": len(meas),
        "total": float(meas.sum()),
        "min_cell": float(meas.min()),
        "f_monotone": bool((fv[1:] > fv[:-1]).all()),
        "f_end": float(fv[-1]),
    }
    if args.csv:
        reporting.write_csv(args.csv, rows, ["index", "f"])
        out["measure"]["csv"] = args.csv

    if args.whitney:
        if args.stilde is None:
            raise SpecError("--whitney needs --stilde")
        levels = args.levels or 4
        holds, margin = check_forget(fig, args.stilde)
        wh: dict = {"forget": {"holds": holds, "margin": margin,
                               "s_tilde": args.stilde}}
        if holds:
            eps = epsilon_sequence(fig, levels)
            weights = whitney_weights(fig, args.stilde, eps, levels)
            wh["eps"] = list(eps)
            wh["s_prime"] = weights.s_prime
            wh["gamma"] = weights.gamma
            wh["s_levels"] = list(weights.s_levels)
            wh["tau"] = list(weights.tau)
            wh["level_weights"] = [list(w) for w in weights.level_weights]
            wh["prefix_ratio_worst"] = check_lemma32_iii(weights)
            wh["modulus"] = empirical_whitney_modulus(
                fig, s, depth, seed=args.seed).as_dict()
        out["whitney"] = wh
    return 0, out


# ---------------------------------------------------------------------------
# parser / dispatch
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quasiarc",
        description="Self-similar arcs: validation, dimension, angle "
                    "profiles, Whitney/quasi-arc evidence, tau family tools.")
    parser.add_argument("--seed", type=int, default=0,
                        help="sampling seed for empirical scans (default 0)")
    parser.add_argument("--report", default=None, metavar="FILE",
                        help="write the JSON report here instead of stdout")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("validate", help="check a figure spec")
    p.add_argument("spec")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("render", help="depth-k polyline as SVG")
    p.add_argument("spec")
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--out", required=True, help="SVG output path")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("dimension", help="similarity dimension")
    p.add_argument("spec")
    p.set_defaults(func=cmd_dimension)

    p = sub.add_parser("angles", help="certified angle profile")
    p.add_argument("spec")
    p.set_defaults(func=cmd_angles)

    p = sub.add_parser("conditions", help="per-corner W and Q verdicts")
    p.add_argument("spec")
    p.add_argument("--t", type=float, action="append",
                   help="quasi-arc exponent(s), repeatable (default 1 and 2)")
    p.add_argument("--p", type=int, action="append",
                   help="corner indices (default: every interior corner)")
    p.add_argument("--bound", type=int, default=4096, metavar="N")
    p.add_argument("--depth", type=int, default=0,
                   help="also run the empirical scan at this depth")
    p.set_defaults(func=cmd_conditions)

    family = sub.add_parser("family", help="the one-parameter arc family")
    fam_sub = family.add_subparsers(dest="family_cmd", required=True)
    p = fam_sub.add_parser("classify",
                           help="number-theoretic vs geometric classification")
    p.add_argument("--tau", required=True,
                   help="p/q, decimal, or 7.11|7.12|7.13|7.14:key=value,...")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--bound", type=int, default=4096, metavar="N")
    p.set_defaults(func=cmd_family_classify)

    tau = sub.add_parser("tau", help="dyadic-exponent tau constructions")
    tau_sub = tau.add_subparsers(dest="tau_cmd", required=True)
    p = tau_sub.add_parser("construct", help="materialise a construction")
    p.add_argument("--kind", required=True, choices=sorted(_TAU_KINDS))
    p.add_argument("--params", default="",
                   help="comma-separated key=value (a0, nu, terms)")
    p.set_defaults(func=cmd_tau_construct)

    p = sub.add_parser("measure", help="cylinder measures and the "
                                       "measure coordinate f")
    p.add_argument("spec")
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--whitney", action="store_true",
                   help="also build forgetting weights and modulus table")
    p.add_argument("--stilde", type=float, default=None)
    p.add_argument("--levels", type=int, default=0, metavar="K")
    p.add_argument("--csv", default=None, metavar="FILE",
                   help="write the f table as CSV here")
    p.set_defaults(func=cmd_measure)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, report = args.func(args)
    except SpecError as exc:
        reporting.write_json(args.report, {"error": exc.payload})
        return 3
    except InvalidFigureError as exc:
        reporting.write_json(args.report, {
            "error": {"type": "InvalidFigure", "message": str(exc),
                      "validation": exc.report.as_dict()}})
        return 3
    except (TauOutOfRange, OverflowPolicyError, IrrationalRequired) as exc:
        reporting.write_json(args.report, {
            "error": {"type": type(exc).__name__, "message": str(exc)}})
        return 4
    except (ValueError, OverflowError) as exc:
        reporting.write_json(args.report, {
            "error": {"type": type(exc).__name__, "message": str(exc)}})
        return 4
    reporting.write_json(args.report, report)
    return code


if __name__ == "__main__":
    sys.exit(main())
