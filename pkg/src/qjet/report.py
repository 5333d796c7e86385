"""Versioned JSON reports for CLI runs."""

from __future__ import annotations

import json
from typing import Dict, List, Optional

import jsonschema

from .braid import CheckResult

REPORT_SCHEMA_VERSION = 1

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "qjet report",
    "type": "object",
    "required": ["schema", "version", "command", "geometry", "options", "seed", "checks"],
    "properties": {
        "schema": {"const": "qjet-report"},
        "version": {"const": REPORT_SCHEMA_VERSION},
        "command": {"type": "string"},
        "geometry": {"type": "string"},
        "options": {"type": "object", "additionalProperties": {"type": "string"}},
        "parameters": {"type": "array", "items": {"type": "string"}},
        "seed": {"type": "integer"},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "status"],
                "properties": {
                    "name": {"type": "string"},
                    "group": {"type": "string"},
                    "status": {"enum": ["pass", "fail"]},
                    "witness": {"type": ["string", "null"]},
                    "seconds": {"type": "number"},
                },
                "additionalProperties": False,
            },
        },
        "dimensions": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["degree"],
                "additionalProperties": {"type": "integer"},
            },
        },
        "objects": {"type": "object"},
        "summary": {
            "type": "object",
            "properties": {"passed": {"type": "integer"}, "failed": {"type": "integer"}},
        },
    },
    "additionalProperties": False,
}


class Report:
    def __init__(self, command: str, geometry: str, options: Dict[str, str], seed: int,
                 parameters: Optional[List[str]] = None, timings: bool = False):
        self.data: Dict[str, object] = {
            "schema": "qjet-report",
            "version": REPORT_SCHEMA_VERSION,
            "command": command,
            "geometry": geometry,
            "options": {k: str(v) for k, v in sorted(options.items())},
            "parameters": list(parameters or []),
            "seed": int(seed),
            "checks": [],
        }
        self.timings = timings

    @property
    def checks(self) -> List[Dict[str, object]]:
        return self.data["checks"]  # type: ignore[return-value]

    def add_check(self, result: CheckResult, group: str = "connection", seconds: Optional[float] = None) -> None:
        entry: Dict[str, object] = {"name": result.name, "group": group,
                                    "status": "pass" if result.ok else "fail", "witness": result.witness}
        if self.timings and seconds is not None:
            entry["seconds"] = round(seconds, 6)
        self.checks.append(entry)

    def add_dimensions(self, rows: List[Dict[str, int]]) -> None:
        self.data["dimensions"] = rows

    def add_object(self, key: str, value: object) -> None:
        self.data.setdefault("objects", {})[key] = value  # type: ignore[index]

    @property
    def ok(self) -> bool:
        return all(c["status"] == "pass" for c in self.checks)

    def finalize(self) -> Dict[str, object]:
        passed = sum(1 for c in self.checks if c["status"] == "pass")
        self.data["summary"] = {"passed": passed, "failed": len(self.checks) - passed}
        validate_report(self.data)
        return self.data

    def to_json(self) -> str:
        return json.dumps(self.finalize(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def render_text(self) -> str:
        d = self.finalize()
        lines = ["%s %s" % (d["command"], d["geometry"])]
        for k, v in d["options"].items():
            lines.append("  option %s = %s" % (k, v))
        for c in d["checks"]:
            line = "  [%s] %s/%s" % (c["status"].upper(), c["group"], c["name"])
            if "seconds" in c:
                line += " (%.3fs)" % c["seconds"]
            lines.append(line)
            if c["witness"]:
                lines.append("         witness: %s" % c["witness"])
        for row in d.get("dimensions", []):
            lines.append("  degree %d: %s" % (row["degree"], ", ".join(
                "%s=%d" % (k, v) for k, v in row.items() if k != "degree")))
        for key, value in d.get("objects", {}).items():
            lines.append("  %s:" % key)
            lines.extend("    " + l for l in _render(value))
        s = d["summary"]
        if d["checks"]:
            lines.append("  %d passed, %d failed" % (s["passed"], s["failed"]))
        return "\n".join(lines) + "\n"


def _render(value: object) -> List[str]:
    if isinstance(value, dict):
        out = []
        for k, v in value.items():
            if isinstance(v, (dict, list)):
                out.append("%s:" % k)
                out.extend("  " + l for l in _render(v))
            else:
                out.append("%s: %s" % (k, v))
        return out
    if isinstance(value, list):
        out = []
        for v in value:
            if isinstance(v, (dict, list)):
                sub = _render(v)
                out.append("- " + sub[0] if sub else "-")
                out.extend("  " + l for l in sub[1:])
            else:
                out.append("- %s" % v)
        return out
    return [str(value)]


def validate_report(data: Dict[str, object]) -> None:
    jsonschema.validate(data, REPORT_SCHEMA)
