"""Run reports: deterministic JSON / CSV output and solution-path series."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .coalition import from_members, label

JSON = "json"
CSV = "csv-summary"
FORMATS = (JSON, CSV)

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "nucleolus run report",
    "type": "object",
    "required": [
        "digest", "mode", "fixation", "n", "grand_cost", "allocation",
        "stages", "generated_count", "total_proper_coalitions", "fraction",
    ],
    "additionalProperties": False,
    "properties": {
        "digest": {"type": "string"},
        "mode": {"enum": ["exact", "approximate", "brute"]},
        "fixation": {"enum": ["safe", "dual"]},
        "n": {"type": "integer", "minimum": 1},
        "grand_cost": {"type": "number"},
        "allocation": {"type": "array", "items": {"type": "number"}},
        "stages": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["stage", "level", "generated", "fixed", "unique"],
                "additionalProperties": False,
                "properties": {
                    "stage": {"type": "integer", "minimum": 1},
                    "level": {"type": "number"},
                    "generated": {"$ref": "#/$defs/coalitions"},
                    "fixed": {"$ref": "#/$defs/coalitions"},
                    "unique": {"type": "boolean"},
                },
            },
        },
        "generated_count": {"type": "integer", "minimum": 0},
        "total_proper_coalitions": {"type": "integer", "minimum": 0},
        "fraction": {"type": ["number", "null"]},
        "duration": {"type": "number", "minimum": 0},
        "solution_path": {
            "type": "array",
            "items": {
                "type": "array",
                "prefixItems": [{"type": "integer"}, {"type": "number", "minimum": 0}],
                "minItems": 2,
                "maxItems": 2,
            },
        },
    },
    "$defs": {
        "coalitions": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        },
    },
}


@dataclass
class StageSummary:
    stage: int
    level: float
    generated: tuple
    fixed: tuple
    unique: bool


@dataclass
class RunReport:
    digest: str
    mode: str
    fixation: str
    n: int
    grand_cost: float
    allocation: tuple
    stages: list
    generated_count: int
    duration: float | None = None
    solution_path: list | None = None

    @property
    def total_proper_coalitions(self):
        return (1 << self.n) - 2

    @property
    def fraction(self):
        total = self.total_proper_coalitions
        return self.generated_count / total if total > 0 else None

    @classmethod
    def from_result(cls, result, digest, duration=None, reference=None):
        stages = [
            StageSummary(s.stage, float(s.level), tuple(s.generated), tuple(s.fixed), bool(s.unique))
            for s in result.stages
        ]
        path = None if reference is None else solution_path(result.events, reference)
        return cls(
            digest=digest,
            mode=result.mode,
            fixation=result.fixation,
            n=result.n,
            grand_cost=float(result.grand_cost),
            allocation=tuple(float(v) for v in result.allocation),
            stages=stages,
            generated_count=result.generated_count,
            duration=duration,
            solution_path=path,
        )

    def to_dict(self, timing=False):
        out = {
            "digest": self.digest,
            "mode": self.mode,
            "fixation": self.fixation,
            "n": self.n,
            "grand_cost": float(self.grand_cost),
            "allocation": [float(v) for v in self.allocation],
            "stages": [
                {
                    "stage": s.stage,
                    "level": float(s.level),
                    "generated": [label(S) for S in s.generated],
                    "fixed": [label(S) for S in s.fixed],
                    "unique": s.unique,
                }
                for s in self.stages
            ],
            "generated_count": self.generated_count,
            "total_proper_coalitions": self.total_proper_coalitions,
            "fraction": self.fraction,
        }
        if timing and self.duration is not None:
            out["duration"] = float(self.duration)
        if self.solution_path is not None:
            out["solution_path"] = [[int(i), float(d)] for i, d in self.solution_path]
        return out

    @classmethod
    def from_dict(cls, data):
        def masks(groups):
            return tuple(from_members([p - 1 for p in g]) for g in groups)

        stages = [
            StageSummary(s["stage"], s["level"], masks(s["generated"]), masks(s["fixed"]), s["unique"])
            for s in data["stages"]
        ]
        path = data.get("solution_path")
        return cls(
            digest=data["digest"],
            mode=data["mode"],
            fixation=data["fixation"],
            n=data["n"],
            grand_cost=data["grand_cost"],
            allocation=tuple(data["allocation"]),
            stages=stages,
            generated_count=data["generated_count"],
            duration=data.get("duration"),
            solution_path=None if path is None else [(int(i), float(d)) for i, d in path],
        )


def solution_path(events, reference):
    """``(iteration, ||y - reference||)`` after every master solve."""
    ref = np.asarray(reference, dtype=float).ravel()
    out = []
    for ev in events:
        y = np.asarray(ev["y"], dtype=float)
        if y.shape != ref.shape:
            raise ValueError(f"reference has {ref.size} entries but allocations have {y.size}")
        out.append((int(ev["iteration"]), float(math.sqrt(((y - ref) ** 2).sum()))))
    return out


def emit(report: RunReport, fmt=JSON, timing=False):
    """Serialize ``report``.  Output is byte-identical across reruns unless ``timing`` is set."""
    if fmt == JSON:
        return json.dumps(report.to_dict(timing), indent=2) + "\n"
    if fmt == CSV:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["stage", "level", "generated", "fixed", "unique", "generated_count", "fraction"])
        for s in report.stages:
            writer.writerow([
                s.stage,
                repr(float(s.level)),
                _cell(s.generated),
                _cell(s.fixed),
                int(s.unique),
                report.generated_count,
                "" if report.fraction is None else repr(report.fraction),
            ])
        return buf.getvalue()
    raise ValueError(f"format must be one of {FORMATS}, got {fmt!r}")


def _cell(masks):
    return ";".join("{" + ",".join(map(str, label(S))) + "}" for S in masks)


def load_report(text):
    return RunReport.from_dict(json.loads(text))
