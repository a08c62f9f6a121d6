"""Report emission: JSON reports, CSV summaries, run manifests.

report.json is a pure function of (config, seed): no timestamps, sorted
keys, locale-free formatting, so reruns and different worker counts produce
byte-identical files.  Wall-clock data lives in manifest.json only.
"""

import csv
import json
import math
import os
import tempfile
import time
from dataclasses import dataclass, field

SUMMARY_COLUMNS = ("experiment", "model", "seed", "n", "h", "estimate", "se",
                   "bound", "verdict")


def fmt9(x):
    """Numbers with 9 significant digits, '.' decimal separator."""
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "infinity" if x > 0 else "neg-infinity"
        return f"{x:.9g}"
    return "" if x is None else str(x)


def sanitize(obj):
    """Make an object JSON-strict: non-finite floats become strings."""
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "infinity" if obj > 0 else "neg-infinity"
        return obj
    if isinstance(obj, dict):
        return {str(k): sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize(v) for v in obj]
    if hasattr(obj, "item") and callable(obj.item):   # numpy scalars
        return sanitize(obj.item())
    return obj


def atomic_write(path, text):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_report_json(path, payload):
    atomic_write(path, json.dumps(sanitize(payload), sort_keys=True, indent=2,
                                  allow_nan=False) + "\n")


def summary_row_from(report_dict):
    """Reduce a report row dict to the fixed CSV columns."""
    return {
        "experiment": report_dict.get("name", report_dict.get("suite", "")),
        "model": report_dict.get("model", ""),
        "seed": report_dict.get("seed", ""),
        "n": report_dict.get("samples", ""),
        "h": fmt9(report_dict.get("step_size")) if report_dict.get("step_size")
             is not None else "",
        "estimate": fmt9(report_dict.get("mc_estimate")),
        "se": fmt9(report_dict.get("std_error")),
        "bound": fmt9(report_dict.get("analytic_bound")),
        "verdict": report_dict.get("verdict", ""),
    }


def write_summary_csv(path, report_dicts):
    rows = [summary_row_from(r) for r in report_dicts]
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", text=True)
    with os.fdopen(fd, "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=SUMMARY_COLUMNS)
        w.writeheader()
        w.writerows(rows)
    os.replace(tmp, path)


@dataclass
class RunManifest:
    version: str
    command: str
    seed: int
    config: dict = field(default_factory=dict)
    started_at: float = 0.0
    finished_at: float = 0.0
    results: dict = field(default_factory=dict)   # logical name -> path

    def finish(self):
        self.finished_at = time.time()

    def write(self, path):
        payload = {
            "tool_version": self.version,
            "command": self.command,
            "seed": self.seed,
            "config": sanitize(self.config),
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "results": self.results,
        }
        atomic_write(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")
