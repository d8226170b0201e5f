"""Figure-spec files: a small JSON schema describing a basic figure.

Schema (UTF-8 JSON object, unknown keys rejected):

    {
      "name":      optional string label,
      "comment":   optional free text, ignored,
      "apex":      integer index q of the apex vertex,
      "vertices":  list of [x, y] pairs; each coordinate is a JSON number
                   (plain float, no exactness certificate) or a string in
                   the exact grammar below,
      "log_ratio": optional {"base": "p/q",
                             "exponent_first": expr,
                             "exponent_last": expr}
                   declaring mu = base**exponent_first and
                   lam = base**exponent_last for the end contraction ratios
                   (base in (0,1) and both exponents rational)
    }

The exact grammar is deliberately tiny: rationals, ``pi``, ``sqrt`` of
rationals, ``sin``/``cos``/``tan`` of rational multiples of pi, and powers
of positive rationals whose exponent is real and again in the grammar
(so both ``(7/15)**(2000/2001)`` and exponents mixing rationals with
``sqrt(2)`` carry certificates), combined with ``+ - * /``, parentheses
and ``**`` (or ``^``).  When every coordinate parses in it the
figure is built with symbolic vertices, unlocking exact angle and
separation certificates; a coordinate outside the grammar but still
numeric degrades that figure to float-only geometry.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

import sympy as sp
from sympy.parsing.sympy_parser import (convert_xor, parse_expr,
                                        standard_transformations)

from .geom import BasicFigure, LogRatioStructure, build_basic_figure

_MAX_COORD_LEN = 512

_TRANSFORMS = standard_transformations + (convert_xor,)
_LOCALS = {"pi": sp.pi, "sqrt": sp.sqrt, "sin": sp.sin, "cos": sp.cos,
           "tan": sp.tan}
_GLOBALS = {"Integer": sp.Integer, "Float": sp.Float, "Rational": sp.Rational,
            "Symbol": sp.Symbol}


class SpecError(ValueError):
    """A figure spec that does not satisfy the documented schema."""

    def __init__(self, message: str, *, where: str = ""):
        self.where = where
        self.payload = {"type": "spec", "message": message, "where": where}
        super().__init__(f"{where}: {message}" if where else message)


def _exact_ok(e: sp.Expr) -> bool:
    if isinstance(e, sp.Float):
        return False
    if e.is_Rational:
        return True
    if e is sp.pi:
        return True
    if isinstance(e, (sp.Add, sp.Mul)):
        return all(_exact_ok(a) for a in e.args)
    if isinstance(e, sp.Pow):
        base, ex = e.args
        if isinstance(base, sp.Rational) and base > 0 and _exact_ok(ex) \
                and ex.is_real is not False:
            return True
        if isinstance(base, sp.Rational) and base >= 0 \
                and isinstance(ex, sp.Rational) and ex > 0:
            return True
        if ex.is_Integer:
            return _exact_ok(base)
        return False
    if isinstance(e, (sp.sin, sp.cos, sp.tan)):
        return (e.args[0] / sp.pi).is_Rational is True
    return False


def parse_coordinate(value: Any, *, where: str = "") -> tuple[float, sp.Expr | None]:
    """One coordinate -> (float value, exact expression or None)."""
    if isinstance(value, bool):
        raise SpecError("coordinate must be a number or expression string",
                        where=where)
    if isinstance(value, (int, float)):
        return float(value), None
    if not isinstance(value, str):
        raise SpecError("coordinate must be a number or expression string",
                        where=where)
    if len(value) > _MAX_COORD_LEN:
        raise SpecError("coordinate expression too long", where=where)
    try:
        expr = parse_expr(value, local_dict=_LOCALS, global_dict=_GLOBALS,
                          transformations=_TRANSFORMS)
    except Exception as exc:
        raise SpecError(f"cannot parse {value!r}: {exc}", where=where) from exc
    if expr.free_symbols:
        names = ", ".join(sorted(str(s) for s in expr.free_symbols))
        raise SpecError(f"unknown names in {value!r}: {names}", where=where)
    try:
        approx = complex(sp.N(expr, 30))
    except Exception as exc:
        raise SpecError(f"cannot evaluate {value!r}: {exc}", where=where) from exc
    if abs(approx.imag) > 1e-25 * max(1.0, abs(approx.real)):
        raise SpecError(f"{value!r} is not real", where=where)
    return float(approx.real), expr if _exact_ok(expr) else None


def _rational_of(value: Any, *, where: str) -> Fraction:
    val, expr = parse_coordinate(value, where=where)
    if expr is None or not expr.is_Rational:
        raise SpecError("a rational number is required", where=where)
    return Fraction(int(expr.p), int(expr.q))


@dataclass(frozen=True)
class ParsedSpec:
    name: str
    apex: int
    vertices: tuple[complex, ...]
    sym_vertices: tuple[tuple[sp.Expr, sp.Expr], ...] | None
    log_ratio: LogRatioStructure | None
    raw: dict

    @property
    def exact(self) -> bool:
        return self.sym_vertices is not None


_KEYS = {"name", "comment", "apex", "vertices", "log_ratio"}


def parse_spec(data: Any) -> ParsedSpec:
    if not isinstance(data, dict):
        raise SpecError("spec must be a JSON object")
    unknown = set(data) - _KEYS
    if unknown:
        raise SpecError(f"unknown keys {sorted(unknown)}; allowed: {sorted(_KEYS)}")
    name = data.get("name", "")
    if not isinstance(name, str):
        raise SpecError("name must be a string", where="name")

    if "apex" not in data or isinstance(data["apex"], bool) \
            or not isinstance(data["apex"], int):
        raise SpecError("apex must be an integer vertex index", where="apex")
    apex = data["apex"]

    raw_vertices = data.get("vertices")
    if not isinstance(raw_vertices, list) or len(raw_vertices) < 3:
        raise SpecError("vertices must be a list of at least 3 [x, y] pairs",
                        where="vertices")
    floats: list[complex] = []
    syms: list[tuple[sp.Expr, sp.Expr]] = []
    all_exact = True
    for i, pair in enumerate(raw_vertices):
        if not isinstance(pair, list) or len(pair) != 2:
            raise SpecError("each vertex must be an [x, y] pair",
                            where=f"vertices[{i}]")
        x, sx = parse_coordinate(pair[0], where=f"vertices[{i}][0]")
        y, sy = parse_coordinate(pair[1], where=f"vertices[{i}][1]")
        floats.append(complex(x, y))
        if sx is None or sy is None:
            all_exact = False
        else:
            syms.append((sx, sy))

    log_ratio = None
    if "log_ratio" in data:
        lr = data["log_ratio"]
        if not isinstance(lr, dict) or set(lr) != {"base", "exponent_first",
                                                   "exponent_last"}:
            raise SpecError("log_ratio needs exactly base, exponent_first, "
                            "exponent_last", where="log_ratio")
        base = _rational_of(lr["base"], where="log_ratio.base")
        if not 0 < base < 1:
            raise SpecError("base must lie in (0, 1)", where="log_ratio.base")
        log_ratio = LogRatioStructure(
            base=base,
            exponent_first=_rational_of(lr["exponent_first"],
                                        where="log_ratio.exponent_first"),
            exponent_last=_rational_of(lr["exponent_last"],
                                       where="log_ratio.exponent_last"))

    return ParsedSpec(name=name, apex=apex, vertices=tuple(floats),
                      sym_vertices=tuple(syms) if all_exact else None,
                      log_ratio=log_ratio, raw=data)


def load_spec(path: str) -> ParsedSpec:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON in {path}: {exc}") from exc
    return parse_spec(data)


def figure_from_spec(spec: ParsedSpec) -> BasicFigure:
    """Build (and validate) the basic figure a parsed spec describes."""
    return build_basic_figure(list(spec.vertices), spec.apex,
                              sym_vertices=spec.sym_vertices,
                              log_ratio=spec.log_ratio,
                              name=spec.name)
