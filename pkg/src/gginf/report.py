"""JSON and CSV serialization of experiment reports."""
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable

from .experiments import COMPARISON_COLUMNS, ExperimentReport

OCCUPANCY_HEADER = ["state", "visits", "total_sojourn", "mean_sojourn", "theoretical_mean_sojourn", "pmf"]
RECORD_HEADER = ["replication", "index", "start", "length", "customers_served", "max_simultaneous", "censored"]
REGRESSION_HEADER = ["scope", "intercept", "slope", "correlation", "n_points"]


class ReportWriteError(OSError):
    def __init__(self, path, cause):
        super().__init__(f"cannot write {path}: {cause}")
        self.path = path


def to_json(report: ExperimentReport) -> str:
    # sorted keys and repr floats keep the output byte-identical run to run
    return json.dumps(report.to_dict(), sort_keys=True, indent=1, allow_nan=False)


def from_json(text: str) -> ExperimentReport:
    return ExperimentReport.from_dict(json.loads(text))


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return v


def _write_rows(path: Path, header, rows: Iterable) -> Path:
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for row in rows:
                w.writerow([_fmt(v) for v in row])
    except OSError as exc:
        raise ReportWriteError(path, exc) from exc
    return path


def occupancy_rows(report: ExperimentReport):
    occ = report.pooled["occupancy"]
    theo = report.theory.get("mean_sojourn") if report.theory.get("applicable") else None
    for k, visits in enumerate(occ["visits"]):
        yield [
            k,
            visits,
            occ["total_sojourn"][k],
            occ["mean_sojourn"][k],
            theo[k] if theo and k < len(theo) else None,
            occ["pmf"][k],
        ]


def record_rows(report: ExperimentReport):
    t = report.pooled["records"]
    for i in range(len(t["index"])):
        yield [t["replication"][i]] + [t[c][i] for c in RECORD_HEADER[1:]]


def regression_rows(report: ExperimentReport):
    fits = [("pooled", report.pooled["regression"])]
    fits += [(f"replication_{rep['replication']}", rep["regression"]) for rep in report.replications]
    for scope, fit in fits:
        if fit is None:
            yield [scope, None, None, None, 0]
        else:
            yield [scope, fit["intercept"], fit["slope"], fit["correlation"], fit["n_points"]]


def emit_report(report: ExperimentReport, out_dir, fmt: str = "json") -> list[Path]:
    """Write ``report`` under ``out_dir`` and return the paths written."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ReportWriteError(out, exc) from exc
    stem = report.name
    if fmt == "json":
        path = out / f"{stem}.json"
        try:
            path.write_text(to_json(report))
        except OSError as exc:
            raise ReportWriteError(path, exc) from exc
        return [path]
    if fmt != "csv":
        raise ValueError(f"unknown report format {fmt!r}")
    busy = report.pooled["busy_periods"]
    return [
        _write_rows(out / f"{stem}_occupancy.csv", OCCUPANCY_HEADER, occupancy_rows(report)),
        _write_rows(out / f"{stem}_busy_periods.csv", RECORD_HEADER, record_rows(report)),
        _write_rows(out / f"{stem}_busy_length_histogram.csv", ["bin_start", "count"], busy["length_histogram"]),
        _write_rows(out / f"{stem}_max_simultaneous.csv", ["bin_start", "count"], busy["max_simultaneous_distribution"]),
        _write_rows(out / f"{stem}_customers_served.csv", ["bin_start", "count"], busy["customers_served_distribution"]),
        _write_rows(out / f"{stem}_regression.csv", REGRESSION_HEADER, regression_rows(report)),
    ]


def write_comparison(rows: list[dict], path) -> Path:
    header = ["name", *COMPARISON_COLUMNS]
    flat = [[";".join(map(str, r[c])) if isinstance(r[c], list) else r[c] for c in header] for r in rows]
    return _write_rows(Path(path), header, flat)


def load_schema() -> dict:
    from importlib.resources import files

    return json.loads(files("gginf").joinpath("report_schema.json").read_text())
