"""JSON wire formats and deterministic serialization.

Algebra specs are ``{"blocks": [2, 1]}``.  Elements are a list of blocks,
each a row-major matrix of [re, im] pairs.  Output documents carry the
schema tag ``entgeo/1`` and are emitted with floats fixed to 17 significant
digits so identical runs produce byte-identical files; infinite divergences
serialize as the string "inf".
"""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

from .algebra import AlgebraSpec, HermElem, State
from .entropy import ExtReal
from .expfam import ExpFamilySpec

SCHEMA_TAG = "entgeo/1"


class InputFormatError(ValueError):
    """Malformed input document."""


# ---------------------------------------------------------------------------
# decoding
# ---------------------------------------------------------------------------


def algebra_from_json(doc: Any) -> AlgebraSpec:
    try:
        blocks = tuple(int(k) for k in doc["blocks"])
    except (TypeError, KeyError, ValueError) as exc:
        raise InputFormatError(f"bad algebra spec: {exc}") from exc
    try:
        return AlgebraSpec(blocks)
    except ValueError as exc:
        raise InputFormatError(str(exc)) from exc


def element_from_json(algebra: AlgebraSpec, doc: Any) -> HermElem:
    if not isinstance(doc, list) or len(doc) != algebra.num_blocks:
        raise InputFormatError(
            f"element must list {algebra.num_blocks} blocks"
        )
    data = []
    for k, rows in zip(algebra.blocks, doc):
        try:
            m = np.array(
                [[complex(c[0], c[1]) for c in row] for row in rows], dtype=complex
            )
        except (TypeError, IndexError, ValueError) as exc:
            raise InputFormatError(f"bad element block: {exc}") from exc
        if m.shape != (k, k):
            raise InputFormatError(f"block shape {m.shape} does not match size {k}")
        data.append(m)
    try:
        return HermElem(algebra, data)
    except ValueError as exc:
        raise InputFormatError(str(exc)) from exc


def state_from_json(algebra: AlgebraSpec, doc: Any) -> State:
    try:
        return State(element_from_json(algebra, doc))
    except ValueError as exc:
        raise InputFormatError(str(exc)) from exc


def family_from_json(algebra: AlgebraSpec, doc: Any) -> ExpFamilySpec:
    if not isinstance(doc, dict) or "directions" not in doc:
        raise InputFormatError("family needs a 'directions' list")
    dirs = tuple(element_from_json(algebra, d) for d in doc["directions"])
    theta0 = (
        element_from_json(algebra, doc["theta0"])
        if doc.get("theta0") is not None
        else algebra.zero()
    )
    try:
        return ExpFamilySpec(algebra, theta0, dirs)
    except ValueError as exc:
        raise InputFormatError(str(exc)) from exc


# ---------------------------------------------------------------------------
# encoding
# ---------------------------------------------------------------------------


def element_to_json(elem: HermElem) -> list:
    return [
        [[[float(c.real), float(c.imag)] for c in row] for row in block]
        for block in elem.data
    ]


def algebra_to_json(algebra: AlgebraSpec) -> dict:
    return {"blocks": list(algebra.blocks)}


def ext_real_to_json(x: ExtReal) -> Any:
    return "inf" if x.is_infinite else float(x)


def _fmt_float(x: float) -> str:
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if math.isnan(x):
        return '"nan"'
    return format(x, ".17g")


def dumps_canonical(obj: Any) -> str:
    """Deterministic JSON: insertion-ordered keys, floats at 17 significant digits."""
    pieces: list[str] = []
    _emit(obj, pieces)
    return "".join(pieces)


def _emit(obj: Any, out: list[str]) -> None:
    if isinstance(obj, dict):
        out.append("{")
        for i, (key, val) in enumerate(obj.items()):
            if i:
                out.append(",")
            out.append(json.dumps(str(key)))
            out.append(":")
            _emit(val, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, val in enumerate(obj):
            if i:
                out.append(",")
            _emit(val, out)
        out.append("]")
    elif isinstance(obj, bool) or obj is None:
        out.append(json.dumps(obj))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_fmt_float(float(obj)))
    elif isinstance(obj, ExtReal):
        _emit(ext_real_to_json(obj), out)
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    else:
        raise TypeError(f"cannot serialize {type(obj)!r}")


def format_csv_value(x: Any) -> str:
    if isinstance(x, (float, np.floating)):
        v = float(x)
        return "inf" if math.isinf(v) else format(v, ".17g")
    return str(x)


def write_csv(path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(format_csv_value(v) for v in row) + "\n")


# ---------------------------------------------------------------------------
# input schema (validated with jsonschema)
# ---------------------------------------------------------------------------

_COMPLEX = {
    "type": "array",
    "items": {"type": "number"},
    "minItems": 2,
    "maxItems": 2,
}
_MATRIX = {"type": "array", "items": {"type": "array", "items": _COMPLEX}}
_ELEMENT = {"type": "array", "items": _MATRIX, "minItems": 1}
_ALGEBRA = {
    "type": "object",
    "properties": {
        "blocks": {
            "type": "array",
            "items": {"type": "integer", "minimum": 1},
            "minItems": 1,
        }
    },
    "required": ["blocks"],
}
_FAMILY = {
    "type": "object",
    "properties": {
        "theta0": _ELEMENT,
        "directions": {"type": "array", "items": _ELEMENT, "minItems": 1},
    },
    "required": ["directions"],
}

INPUT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "properties": {
        "schema": {"const": SCHEMA_TAG},
        "algebra": _ALGEBRA,
        "family": _FAMILY,
        "u": {"type": "array", "items": _ELEMENT, "minItems": 1},
        "xi": {"type": "array", "items": {"type": "number"}, "minItems": 1},
        "state": _ELEMENT,
        "states": {"type": "array", "items": _ELEMENT},
        "theta": _ELEMENT,
        "direction": _ELEMENT,
        "budget": {
            "type": "object",
            "properties": {
                "grid_per_sphere": {"type": "integer", "minimum": 1},
                "random_samples": {"type": "integer", "minimum": 1},
                "dedupe_tol": {"type": "number", "exclusiveMinimum": 0},
                "max_depth": {"type": "integer", "minimum": 1},
            },
        },
        "family_name": {"type": "string"},
        "grid": {"type": "integer", "minimum": 2},
    },
    "required": ["algebra"],
}


def validate_input(doc: Any) -> None:
    import jsonschema

    try:
        jsonschema.validate(doc, INPUT_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise InputFormatError(f"input does not match the schema: {exc.message}") from exc
