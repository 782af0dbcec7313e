"""Check reports and their JSON schema."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

STATUSES = ("pass", "fail", "skipped", "error")

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["id", "status", "statement", "measured", "tolerances", "runtime", "artifacts", "failures"],
    "properties": {
        "id": {"type": "string", "minLength": 1},
        "status": {"enum": list(STATUSES)},
        "statement": {"type": "string"},
        "tags": {"type": "array", "items": {"type": "string"}},
        "seed": {"type": "integer"},
        "measured": {"type": "object"},
        "tolerances": {"type": "object", "additionalProperties": {"type": "number"}},
        "runtime": {"type": "number", "minimum": 0},
        "artifacts": {"type": "array", "items": {"type": "string"}},
        "failures": {"type": "array", "items": {"type": "object", "required": ["what"]}},
        "message": {"type": "string"},
    },
    # a failing check must carry the numbers that failed
    "if": {"properties": {"status": {"const": "fail"}}},
    "then": {"properties": {"failures": {"minItems": 1}}},
}

SUITE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["seed", "summary", "exit_code", "reports"],
    "properties": {
        "seed": {"type": "integer"},
        "exit_code": {"enum": [0, 1]},
        "summary": {
            "type": "object",
            "required": list(STATUSES) + ["total", "runtime"],
        },
        "reports": {"type": "array", "items": REPORT_SCHEMA},
    },
}


def jsonable(x):
    """Convert numpy scalars/arrays and complex numbers into JSON-friendly values."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": _num(x.real), "im": _num(x.imag)}
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return _num(float(x))
    return x


def _num(v: float):
    # JSON has no inf/nan; keep them visible as strings
    if math.isfinite(v):
        return float(v)
    return "inf" if v > 0 else ("-inf" if v < 0 else "nan")


@dataclass
class CheckReport:
    id: str
    status: str
    statement: str
    measured: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    runtime: float = 0.0
    artifacts: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    tags: list = field(default_factory=list)
    seed: int = 0
    message: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self) -> dict:
        return jsonable({
            "id": self.id,
            "status": self.status,
            "statement": self.statement,
            "tags": list(self.tags),
            "seed": int(self.seed),
            "measured": self.measured,
            "tolerances": self.tolerances,
            "runtime": float(self.runtime),
            "artifacts": list(self.artifacts),
            "failures": self.failures,
            "message": self.message,
        })

    def summary_line(self) -> str:
        extra = f" ({self.message})" if self.message else ""
        return f"{self.status.upper():7s} {self.id:28s} {self.runtime:7.2f}s{extra}"


def suite_json(reports: list[CheckReport], seed: int, exit_code: int, runtime: float) -> dict:
    summary = {s: sum(r.status == s for r in reports) for s in STATUSES}
    summary["total"] = len(reports)
    summary["runtime"] = float(runtime)
    return {"seed": int(seed), "exit_code": int(exit_code), "summary": summary,
            "reports": [r.to_json() for r in reports]}


def write_suite(path, data: dict) -> None:
    with open(path, "w") as fh:
        json.dump(data, fh, indent=1)
