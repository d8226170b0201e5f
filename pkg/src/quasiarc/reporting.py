"""Deterministic serialization of reports: JSON, RFC-4180 CSV, digests.

Reports are plain dicts of JSON-able values.  ``canonical_json`` fixes key
order and float formatting so identical inputs give byte-identical output;
``digest`` hashes the same canonical form, making it usable as a stable
figure/report fingerprint in regression tests.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import sys
from fractions import Fraction
from typing import Any, Mapping, Sequence

sys.set_int_max_str_digits(1_000_000)


def sanitize(obj: Any) -> Any:
    """Coerce a report value into strict JSON territory.

    Non-finite floats become the strings "nan"/"inf"/"-inf" (JSON has no
    spelling for them and null would be ambiguous); fractions render as
    "p/q"; complex values as [re, im]; tuples as lists.  Anything else
    unrecognized falls back to ``str``.
    """
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, int):
        # astronomically large exact integers (scheduling exponents) become
        # decimal strings: exact, and parseable by default-limit consumers
        return obj if obj.bit_length() <= 1024 else str(obj)
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, complex):
        return [sanitize(obj.real), sanitize(obj.imag)]
    if isinstance(obj, Mapping):
        return {str(k): sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(str(v) for v in obj)
    return str(obj)


def canonical_json(obj: Any) -> str:
    return json.dumps(sanitize(obj), sort_keys=True, indent=2,
                      ensure_ascii=False, allow_nan=False) + "\n"


def digest(obj: Any) -> str:
    """Stable sha256 fingerprint of the canonical compact form."""
    compact = json.dumps(sanitize(obj), sort_keys=True,
                         separators=(",", ":"), ensure_ascii=False,
                         allow_nan=False)
    return hashlib.sha256(compact.encode("utf-8")).hexdigest()


def write_json(path: str | None, obj: Any) -> None:
    text = canonical_json(obj)
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def csv_table(rows: Sequence[Mapping[str, Any]],
              columns: Sequence[str] | None = None) -> str:
    """RFC-4180 style CSV (CRLF line ends, minimal quoting) of a row list."""
    if columns is None:
        columns = list(rows[0].keys()) if rows else []
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(list(columns))
    for row in rows:
        writer.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def _cell(value: Any) -> Any:
    v = sanitize(value)
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True, separators=(",", ":"))
    return v


def write_csv(path: str, rows: Sequence[Mapping[str, Any]],
              columns: Sequence[str] | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(csv_table(rows, columns))
