"""Reading and writing measure files and JSON reports.

Measure file layout::

    {"dim": 2, "mode": "exact",
     "atoms": [{"x": ["1", "-1/2"], "w": "3/4"}, ...]}

Exact scalars are ``"p/q"`` strings (plain integers are accepted too);
float-mode scalars are JSON numbers.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Any

from .cones import Surd
from .errors import MeasureFormatError
from .measure import AtomicMeasure, NumericMode, new_measure

SCHEMA_VERSION = "1"


def _parse_exact(value: Any, where: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise MeasureFormatError(f"{where}: exact scalar must be a 'p/q' string, got {value!r}")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise MeasureFormatError(f"{where}: invalid rational {value!r}") from exc


def _parse_float(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise MeasureFormatError(f"{where}: float scalar must be a JSON number, got {value!r}")
    if not math.isfinite(value):
        raise MeasureFormatError(f"{where}: non-finite value {value!r}")
    return float(value)


def measure_from_dict(data: Any, source: str = "<measure>") -> AtomicMeasure:
    if not isinstance(data, dict):
        raise MeasureFormatError(f"{source}: top level must be an object")
    dim = data.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise MeasureFormatError(f"{source}: field 'dim' must be a positive integer, got {dim!r}")
    kind = data.get("mode", "exact")
    if kind not in ("exact", "float"):
        raise MeasureFormatError(f"{source}: field 'mode' must be 'exact' or 'float', got {kind!r}")
    mode = NumericMode(kind)
    parse = _parse_exact if mode.exact else _parse_float
    atoms = data.get("atoms")
    if not isinstance(atoms, list):
        raise MeasureFormatError(f"{source}: field 'atoms' must be a list")
    pairs = []
    for i, atom in enumerate(atoms):
        where = f"{source}: atoms[{i}]"
        if not isinstance(atom, dict) or "x" not in atom or "w" not in atom:
            raise MeasureFormatError(f"{where}: expected an object with 'x' and 'w'")
        xs = atom["x"]
        if not isinstance(xs, list):
            xs = [xs]
        if len(xs) != dim:
            raise MeasureFormatError(f"{where}.x: expected {dim} coordinates, got {len(xs)}")
        point = tuple(parse(c, f"{where}.x[{j}]") for j, c in enumerate(xs))
        pairs.append((point, parse(atom["w"], f"{where}.w")))
    return new_measure(dim, pairs, mode)


def measure_to_dict(m: AtomicMeasure) -> dict:
    enc = str if m.mode.exact else float
    return {
        "dim": m.dim,
        "mode": m.mode.kind,
        "atoms": [{"x": [enc(c) for c in x], "w": enc(w)} for x, w in m.atoms],
    }


def load_measure(path) -> AtomicMeasure:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise MeasureFormatError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return measure_from_dict(data, str(path))


def save_measure(m: AtomicMeasure, path) -> None:
    Path(path).write_text(dumps(measure_to_dict(m)))


def to_jsonable(value: Any) -> Any:
    """Lossless JSON view of report values (rationals become ``"p/q"``)."""
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        return value if math.isfinite(value) else str(value)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, Surd):
        return str(value)
    if isinstance(value, AtomicMeasure):
        return measure_to_dict(value)
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if hasattr(value, "to_dict"):
        return to_jsonable(value.to_dict())
    return str(value)


def dumps(value: Any) -> str:
    return json.dumps(to_jsonable(value), indent=2, sort_keys=True) + "\n"


def save_report(report, path) -> None:
    Path(path).write_text(dumps(report))
