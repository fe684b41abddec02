"""Deterministic machine-readable run reports.

Reports are canonical JSON (sorted keys, fixed separators) so repeated
runs with the same inputs, seed, and budgets are byte-identical.  Wall
clock timings are therefore opt-in: they join the report only when the
caller asks for them.
"""

from __future__ import annotations

import hashlib
import json
from typing import Optional

SCHEMA_VERSION = "report/1"


def canonical_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def build_report(
    command: str,
    inputs: dict,
    params: dict,
    records: list,
    status: str,
    seed: int = 0,
    budgets: Optional[dict] = None,
    timings: Optional[dict] = None,
) -> dict:
    report = {
        "schema": SCHEMA_VERSION,
        "command": command,
        "inputs": {name: digest(text) for name, text in sorted(inputs.items())},
        "params": params,
        "records": records,
        "status": status,
        "seed": seed,
        "budgets": budgets or {},
    }
    if timings is not None:
        report["timings"] = timings
    return report


def write_report(path: str, report: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(report))
        fh.write("\n")
