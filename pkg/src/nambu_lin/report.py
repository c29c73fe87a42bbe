"""Structured JSON reports and CSV trajectory export."""

from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import json
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from .exterior import _Graded
from .frontend import serialize
from .linalg import Signature
from .poly import Poly, RationalFunc

SCHEMA_VERSION = 1

__all__ = ["SCHEMA_VERSION", "to_jsonable", "build_report", "dump_report", "sha256_text", "write_csv"]


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def to_jsonable(obj: Any, names=None) -> Any:
    """Convert library values into plain JSON types (exact values become strings)."""
    if obj is None or isinstance(obj, (bool, str, int)):
        return obj
    if isinstance(obj, float):
        return obj if np.isfinite(obj) else repr(obj)
    if isinstance(obj, (np.floating,)):
        return to_jsonable(float(obj))
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, Signature):
        return [obj.pos, obj.neg]
    if isinstance(obj, (Poly, _Graded)):
        return serialize(obj, names)
    if isinstance(obj, RationalFunc):
        return {"num": serialize(obj.num, list(obj.vars)), "den": serialize(obj.den, list(obj.vars))}
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v, names) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v, names) for v in obj]
    return repr(obj)


def build_report(command: str, inputs: dict, stages: list[dict], verdict: str,
                 max_residual: float | None = None, timings: dict | None = None, **extra) -> dict:
    """Assemble a report.  ``timings`` holds wall-clock durations in seconds; a
    UTC timestamp is always added under ``timings.timestamp``."""
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": to_jsonable(inputs),
        "verdict": verdict,
        "stages": [to_jsonable(s) for s in stages],
    }
    if max_residual is not None:
        report["max_residual"] = float(max_residual)
    report.update({k: to_jsonable(v) for k, v in extra.items()})
    t = {"durations": dict(timings)} if timings else {}
    t["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
    report["timings"] = to_jsonable(t)
    return report


def dump_report(report: dict, path: str | Path | None = None) -> str:
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def write_csv(record, path: str | Path) -> None:
    """Write a trajectory as ``t,x1,...,xn,f,theta`` with round-trip float formatting."""
    n = record.points.shape[1] if len(record.points) else record.spec.n
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["t"] + [f"x{i + 1}" for i in range(n)] + ["f", "theta"])
        for t, p, f, th in zip(record.times, record.points, record.f_values, record.theta):
            w.writerow([repr(float(t))] + [repr(float(v)) for v in p] + [repr(float(f)), repr(float(th))])
