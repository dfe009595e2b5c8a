"""Versioned JSON report envelope shared by every CLI subcommand."""

from __future__ import annotations

import json
import math
from typing import Any

from .scalars import format_scalar, is_exact

__all__ = ["SCHEMA", "envelope", "dumps", "jsonable", "cjson"]

SCHEMA = "pvi-rh-lab/report-v1"


def cjson(z) -> Any:
    """Exact scalars as rational strings, everything else as [re, im]."""
    if is_exact(z):
        return format_scalar(z)
    z = complex(z)
    return [z.real, z.imag]


def jsonable(obj):
    """Recursively convert to plain JSON; non-finite floats become null."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, complex):
        return [jsonable(obj.real), jsonable(obj.imag)]
    if hasattr(obj, "item"):  # numpy scalars
        return jsonable(obj.item())
    if hasattr(obj, "to_json"):
        return jsonable(obj.to_json())
    if is_exact(obj):
        return format_scalar(obj)
    try:
        return jsonable(float(obj))
    except (TypeError, ValueError):
        return str(obj)


def envelope(command: str, claim: str, result, *, passed: bool | None = None,
             tolerances: dict | None = None, certificates: dict | None = None,
             seed: int | None = None, config: dict | None = None,
             wall_time: float | None = None) -> dict:
    return jsonable({
        "schema": SCHEMA,
        "command": command,
        "claim": claim,
        "passed": passed,
        "seed": seed,
        "tolerances": tolerances or {},
        "certificates": certificates or {},
        "config": config or {},
        "result": result,
        "wall_time_s": wall_time,
    })


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"
