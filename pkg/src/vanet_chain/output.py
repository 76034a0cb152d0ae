"""Write the CSV and JSON outputs of a scenario run.

Everything is rebuilt from the integers and floats in the run payload,
so two payloads with equal numbers produce byte-identical files. Floats
are printed with repr (shortest round-trip form) and lines end with a
bare newline on every platform.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .stats import wilson_bounds


def _fmt(value) -> str:
    return repr(float(value))


def _write(path: Path, text: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _analytic_csv(exp: dict) -> str:
    dt = exp["calibration"]["dt_s"]
    start = exp["support_start"]
    lines = ["index,time_s,probability,log10_probability"]
    for i, prob in enumerate(exp["analytic"]):
        index = start + i
        log_cell = _fmt(math.log10(prob)) if prob > 0.0 else ""
        lines.append(f"{index},{_fmt(index * dt)},{_fmt(prob)},{log_cell}")
    return "\n".join(lines) + "\n"


def _empirical_csv(exp: dict) -> str:
    dt = exp["calibration"]["dt_s"]
    start = exp["support_start"]
    counts = np.asarray(exp["counts"], dtype=np.int64)
    total = exp["episodes"]
    low, high = wilson_bounds(counts, total)
    lines = ["index,time_s,count,frequency,ci_low,ci_high"]
    for i, count in enumerate(counts):
        index = start + i
        lines.append(f"{index},{_fmt(index * dt)},{int(count)},{_fmt(count / total)},"
                     f"{_fmt(low[i])},{_fmt(high[i])}")
    return "\n".join(lines) + "\n"


def _report_json(exp: dict) -> str:
    doc = {"name": exp["name"], "kind": exp["kind"], "passed": exp["passed"],
           "max_ci_violation_rate": exp["max_ci_violation_rate"],
           "simulation": exp["simulation"], "report": exp["report"],
           "mean_check": exp.get("mean_check")}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_scenario_outputs(payload: dict, out_dir) -> list[Path]:
    """Write per-experiment CSVs, per-experiment reports, and run.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    def emit(name: str, text: str) -> None:
        path = out / name
        _write(path, text)
        written.append(path)

    for exp in payload["experiments"]:
        emit(f"{exp['name']}_analytic.csv", _analytic_csv(exp))
        if exp.get("counts") is not None:
            emit(f"{exp['name']}_empirical.csv", _empirical_csv(exp))
            emit(f"{exp['name']}_report.json", _report_json(exp))
    emit("run.json", json.dumps(payload["manifest"], indent=2, sort_keys=True) + "\n")
    return written
