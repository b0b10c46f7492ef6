"""Deterministic JSON and CSV emission of reports."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .runner import Report

TIMING_KEYS = frozenset({"wall_clock_s"})


def jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (complex, np.complexfloating)):
        return [jsonable(float(obj.real)), jsonable(float(obj.imag))]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def report_to_dict(report: Report, timing: bool = True) -> dict:
    checks = []
    for c in report.checks:
        d = asdict(c)
        if not timing:
            d.pop("wall_clock_s")
        checks.append(d)
    return jsonable({
        "scenario": report.scenario,
        "seed": report.seed,
        "status": "pass" if report.passed else "fail",
        "exit_code": report.exit_code,
        "normalization": report.normalization,
        "checks": checks,
    })


def strip_timing(data):
    if isinstance(data, dict):
        return {k: strip_timing(v) for k, v in data.items() if k not in TIMING_KEYS}
    if isinstance(data, list):
        return [strip_timing(v) for v in data]
    return data


def report_json(report: Report, timing: bool = True) -> str:
    return json.dumps(report_to_dict(report, timing), indent=2) + "\n"


def _sort_key(row):
    head = row[0]
    return (0, head) if isinstance(head, (int, float)) else (1, str(head))


def emit_report(report: Report, out_dir, fmt: str = "json", timing: bool = True) -> list[Path]:
    """Write ``report.json`` and/or one CSV per table; returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt in ("json", "both"):
        path = out / "report.json"
        path.write_text(report_json(report, timing))
        written.append(path)
    if fmt in ("csv", "both"):
        data = report_to_dict(report, timing)
        for check in data["checks"]:
            for tname, table in sorted(check["tables"].items()):
                path = out / f"{check['name']}_{tname}.csv"
                with path.open("w", newline="") as fh:
                    writer = csv.writer(fh, lineterminator="\n")
                    writer.writerow(table["columns"])
                    for row in sorted(table["rows"], key=_sort_key):
                        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
                written.append(path)
    return written
