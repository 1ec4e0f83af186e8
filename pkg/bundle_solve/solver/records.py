"""Trace (JSON lines) and result (JSON) files."""

import json
from pathlib import Path

from bundle_solve.models.result import SolveResult, TraceRecord


def write_trace(records: list[TraceRecord], path: Path | str) -> None:
    """Write one JSON object per trace record."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(record.to_dict()) + "\n")


def read_trace(path: Path | str) -> list[TraceRecord]:
    with open(path, encoding="utf-8") as f:
        return [TraceRecord(**json.loads(line)) for line in f if line.strip()]


def write_result(result: SolveResult, path: Path | str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(result.to_dict(), f, indent=2)
        f.write("\n")


def read_result(path: Path | str) -> dict:
    """Load a result file as a plain dict (status, eps_achieved, policy, values, counts)."""
    with open(path, encoding="utf-8") as f:
        return json.load(f)
