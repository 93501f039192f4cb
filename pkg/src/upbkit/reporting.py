"""Deterministic report serialization and schema validation.

Reports are JSON with a fixed layout::

    {"config": {...}, "payload": {...}, "meta": {...}}

The payload is rendered by a dedicated emitter rather than ``json.dumps`` so
that the byte stream is fully under our control: reals are written with 17
significant digits (round-trip exact), complex numbers appear only as
two-element ``[re, im]`` arrays, keys keep insertion order, and the only
non-finite spellings are ``Infinity`` / ``-Infinity`` / ``NaN`` (which
``json.loads`` accepts back).  Re-running a command with an identical config
therefore reproduces the payload byte for byte.
"""

from __future__ import annotations

import math
from typing import Any

import numpy as np


class SchemaError(ValueError):
    """A report does not match the documented schema."""


def format_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    text = format(float(x), ".17g")
    if not any(ch in text for ch in ".eE"):
        text += ".0"
    return text


def complex_pair(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _emit(value: Any, indent: int, out: list[str]) -> None:
    pad = "  " * indent
    if value is None:
        out.append("null")
    elif isinstance(value, bool):
        out.append("true" if value else "false")
    elif isinstance(value, (int, np.integer)):
        out.append(str(int(value)))
    elif isinstance(value, (float, np.floating)):
        out.append(format_float(float(value)))
    elif isinstance(value, str):
        out.append('"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"')
    elif isinstance(value, dict):
        if not value:
            out.append("{}")
            return
        out.append("{\n")
        items = list(value.items())
        for i, (key, val) in enumerate(items):
            if not isinstance(key, str):
                raise TypeError(f"report keys must be strings, got {key!r}")
            out.append(pad + "  ")
            _emit(key, 0, out)
            out.append(": ")
            _emit(val, indent + 1, out)
            out.append(",\n" if i + 1 < len(items) else "\n")
        out.append(pad + "}")
    elif isinstance(value, (list, tuple)):
        if not len(value):
            out.append("[]")
            return
        out.append("[")
        for i, val in enumerate(value):
            if i:
                out.append(", ")
            _emit(val, indent + 1, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}; convert to plain types first")


def dumps_canonical(value: Any) -> str:
    """Render plain dict/list/scalar data as deterministic JSON text."""
    out: list[str] = []
    _emit(value, 0, out)
    out.append("\n")
    return "".join(out)


# --------------------------------------------------------------------------
# schema validation
#
# Spec mini-language:
#   "int" | "float" | "str" | "bool" | "null"  primitive (float accepts int)
#   ("list", spec)                             homogeneous array
#   ("pair",)                                  [re, im] with two numbers
#   ("map", spec)                              object with arbitrary string keys
#   ("any_of", spec, ...)                      first matching alternative wins
#   {key: spec, ...}                           object with exactly these keys
# --------------------------------------------------------------------------

_LOCAL_PAIR = ("list", ("pair",))
_MEMBER = ("list", _LOCAL_PAIR)

_PER_EPSILON_ROW = {
    "epsilon": "float",
    "predicted_min": "float",
    "exact_min": "float",
    "abs_error": "float",
    "decided_by": "str",
}

_SCAN_SAMPLE = {
    "noise": "str",
    "compression_eigenvalues": ("list", "float"),
    "verdict": "str",
    "lambda_min": "float",
    "per_epsilon": ("list", _PER_EPSILON_ROW),
}

_HUNT_SAMPLE = {
    "index": "int",
    "distinct_count": "int",
    "rank": "int",
    "overlaps": ("list", "float"),
}

_CUT_ROW = {
    "side_a": ("list", "int"),
    "side_b": ("list", "int"),
    "ppt": "bool",
    "min_eigenvalue": "float",
}

PAYLOAD_SCHEMAS: dict[str, dict] = {
    "build": {
        "members": ("list", _MEMBER),
        "spectrum": ("list", "float"),
        "ppt": ("list", _CUT_ROW),
        "rank": "int",
    },
    "certify": {
        "max_overlap": "float",
        "restarts": "int",
        "certified": "bool",
        "best_product_vector": _MEMBER,
        "witness_trace": "float",
        "witness_detected_value": "float",
    },
    "perturb-scan": {
        "cut": {"side_a": ("list", "int"), "side_b": ("list", "int")},
        "samples": ("list", _SCAN_SAMPLE),
        "verdict_counts": ("map", "int"),
    },
    "rank-mixtures": {
        "rank_first": "int",
        "rank_second": "int",
        "rank_equal_mixture": "int",
        "rank_state_plus_member": "int",
        "rank_tol": "float",
    },
    "subspace-hunt": {
        "kind": "str",
        "dim": "int",
        "samples": ("list", _HUNT_SAMPLE),
        "histogram": ("map", "int"),
    },
    "witness-radius": {
        "direction": ("any_of", "str", ("map", "float")),
        "radius": "float",
        "detected_value": "float",
        "denominator": "float",
        "check": (
            "any_of",
            "null",
            {
                "inside_scale": "float",
                "inside_value": "float",
                "outside_scale": "float",
                "outside_value": "float",
            },
        ),
    },
}

META_SCHEMA = {"toolkit_version": "str", "elapsed_seconds": "float"}


def _check(value: Any, spec: Any, path: str) -> None:
    if spec == "int":
        if not isinstance(value, int) or isinstance(value, bool):
            raise SchemaError(f"{path}: expected int, got {type(value).__name__}")
    elif spec == "float":
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise SchemaError(f"{path}: expected number, got {type(value).__name__}")
    elif spec == "str":
        if not isinstance(value, str):
            raise SchemaError(f"{path}: expected string, got {type(value).__name__}")
    elif spec == "bool":
        if not isinstance(value, bool):
            raise SchemaError(f"{path}: expected bool, got {type(value).__name__}")
    elif spec == "null":
        if value is not None:
            raise SchemaError(f"{path}: expected null")
    elif isinstance(spec, dict):
        if not isinstance(value, dict):
            raise SchemaError(f"{path}: expected object, got {type(value).__name__}")
        unknown = set(value) - set(spec)
        if unknown:
            raise SchemaError(f"{path}: unknown fields {sorted(unknown)}")
        missing = set(spec) - set(value)
        if missing:
            raise SchemaError(f"{path}: missing fields {sorted(missing)}")
        for key, sub in spec.items():
            _check(value[key], sub, f"{path}.{key}")
    elif isinstance(spec, tuple) and spec and spec[0] == "list":
        if not isinstance(value, list):
            raise SchemaError(f"{path}: expected array, got {type(value).__name__}")
        for i, item in enumerate(value):
            _check(item, spec[1], f"{path}[{i}]")
    elif isinstance(spec, tuple) and spec and spec[0] == "pair":
        if not isinstance(value, list) or len(value) != 2:
            raise SchemaError(f"{path}: expected [re, im] pair")
        for i, item in enumerate(value):
            _check(item, "float", f"{path}[{i}]")
    elif isinstance(spec, tuple) and spec and spec[0] == "map":
        if not isinstance(value, dict):
            raise SchemaError(f"{path}: expected object, got {type(value).__name__}")
        for key, item in value.items():
            if not isinstance(key, str):
                raise SchemaError(f"{path}: non-string key {key!r}")
            _check(item, spec[1], f"{path}.{key}")
    elif isinstance(spec, tuple) and spec and spec[0] == "any_of":
        for alt in spec[1:]:
            try:
                _check(value, alt, path)
                return
            except SchemaError:
                continue
        raise SchemaError(f"{path}: no schema alternative matched")
    else:
        raise AssertionError(f"bad schema spec at {path}: {spec!r}")


def validate_report(report: Any) -> None:
    """Raise SchemaError unless the parsed report matches the documented schema."""
    if not isinstance(report, dict):
        raise SchemaError("report must be an object")
    unknown = set(report) - {"config", "payload", "meta"}
    if unknown:
        raise SchemaError(f"report: unknown top-level fields {sorted(unknown)}")
    for key in ("config", "payload", "meta"):
        if key not in report:
            raise SchemaError(f"report: missing top-level field {key!r}")
    _check(report["meta"], META_SCHEMA, "meta")
    config = report["config"]
    if not isinstance(config, dict) or "command" not in config:
        raise SchemaError("config: missing command")
    command = config["command"]
    if command not in PAYLOAD_SCHEMAS:
        raise SchemaError(f"config.command: unknown command {command!r}")
    _check(report["payload"], PAYLOAD_SCHEMAS[command], "payload")
