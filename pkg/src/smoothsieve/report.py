"""Canonical JSON reports.

Reproducibility is the product: reports are serialized with sorted keys,
floats rounded to 6 significant digits, and rationals as "num/den" strings,
so byte comparison of two runs is meaningful.  Wall time and shard count sit
outside the payload; payloads must be identical across reruns with the same
parameters and seed, whatever the thread count.
"""

from __future__ import annotations

import json
from fractions import Fraction

from . import __version__


def canonical(obj):
    """Normalize to JSON-ready values: Fractions -> "num/den", floats -> 6 sig digits."""
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, float):
        return float(f"{obj:.6g}")
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(v) for v in obj]
    if isinstance(obj, (str, int, bool)) or obj is None:
        return obj
    return str(obj)


def dumps(obj) -> str:
    return json.dumps(canonical(obj), sort_keys=True, indent=2) + "\n"


def run_report(command: str, params: dict, payload: dict, seed=None,
               shard_count: int = 1, wall_time: float = 0.0) -> dict:
    return {
        "command": command,
        "params": canonical(params),
        "payload": canonical(payload),
        "seed": seed,
        "shard_count": shard_count,
        "wall_time": float(f"{wall_time:.6g}"),
        "artifact_version": __version__,
    }


def fraction_pair(x: Fraction) -> dict:
    return {"value": x, "float": float(x)}
