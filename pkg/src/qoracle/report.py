"""Machine-readable run reports."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .oracles import OracleVerdict

SCHEMA_VERSION = "1.0"

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2

_VERDICT_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["oracle_id", "passed", "measured", "location", "message"],
    "properties": {
        "oracle_id": {"enum": ["PROBABILITY", "WIDTH", "REVERSIBILITY", "ENTROPY"]},
        "passed": {"type": "boolean"},
        "measured": {
            "type": "object",
            "additionalProperties": {"type": ["number", "string", "boolean", "null"]},
        },
        "location": {"type": ["integer", "string"]},
        "message": {"type": "string"},
    },
}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "qoracle report",
    "type": "object",
    "additionalProperties": False,
    "required": ["schema_version", "invocation", "verdicts", "campaign", "exit_status"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "invocation": {"type": "object"},
        "verdicts": {"type": "array", "items": _VERDICT_SCHEMA},
        "campaign": {"type": ["object", "null"]},
        "exit_status": {"enum": [EXIT_OK, EXIT_VIOLATION, EXIT_USAGE]},
    },
}


@dataclass
class Report:
    invocation: dict
    verdicts: list[OracleVerdict] = field(default_factory=list)
    campaign: dict | None = None
    exit_status: int = EXIT_OK
    schema_version: str = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "invocation": self.invocation,
            "verdicts": [v.to_dict() for v in self.verdicts],
            "campaign": self.campaign,
            "exit_status": self.exit_status,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=False) + "\n"

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())
