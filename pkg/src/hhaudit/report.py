"""CSV and JSON report writers. Column order is fixed by ``SCHEMA_VERSION``."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import List, Optional, Sequence

from . import bounds as B
from .audit import AuditRecord, SweepResult

SCHEMA_VERSION = "1"

BASE_COLUMNS = ["schema_version", "family", "fam_params", "a", "b", "alpha", "m", "p", "q",
                "mu1", "tau1", "mu2", "tau2", "eta", "eta_case", "gap", "lemma1_residual"]


def bound_columns() -> List[str]:
    cols = []
    for th in B.THEOREMS:
        for var in B.VARIANTS:
            stem = f"{th.value}_{var.value}"
            cols += [f"{stem}_bound", f"{stem}_tightness", f"{stem}_violation"]
    return cols


COLUMNS = BASE_COLUMNS + bound_columns() + ["certifier_status"]


def _num(x: Optional[float]) -> Optional[float]:
    if x is None or not math.isfinite(x):
        return None
    return float(x)


def record_row(rec: AuditRecord) -> dict:
    prm = rec.params
    row = {
        "schema_version": SCHEMA_VERSION,
        "family": rec.family,
        "fam_params": rec.spec.describe(),
        "a": prm.interval.a, "b": prm.interval.b, "alpha": prm.alpha, "m": prm.m,
        "p": prm.p, "q": prm.q, "mu1": prm.mu1, "tau1": prm.tau1, "mu2": prm.mu2, "tau2": prm.tau2,
        "eta": rec.eta,
        "eta_case": rec.eta_case.value if rec.eta_case else None,
        "gap": rec.gap,
        "lemma1_residual": rec.lemma1_residual,
    }
    for ba in rec.bounds:
        stem = f"{ba.result.theorem.value}_{ba.result.variant.value}"
        row[f"{stem}_bound"] = ba.result.value
        row[f"{stem}_tightness"] = ba.tightness
        row[f"{stem}_violation"] = int(ba.violation)
    row["certifier_status"] = rec.certifier_status
    return {k: (_num(v) if isinstance(v, float) else v) for k, v in row.items()}


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def to_csv(records: Sequence[AuditRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for rec in records:
        row = record_row(rec)
        w.writerow([_cell(row[c]) for c in COLUMNS])
    return buf.getvalue()


def _clean(obj):
    if isinstance(obj, float):
        return _num(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_clean(v) for v in obj]
    return obj


def to_json(result: SweepResult) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "summary": result.summary,
        "records": [record_row(r) for r in result.records],
    }
    return json.dumps(_clean(doc), indent=1, allow_nan=False) + "\n"


def write_reports(result: SweepResult, out_dir: str | Path, fmt: str = "csv",
                  name: str = "audit_report") -> List[Path]:
    """Write the report (and, for CSV, a JSON summary alongside). Returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        path = out / f"{name}.json"
        path.write_text(to_json(result), encoding="utf-8")
        return [path]
    path = out / f"{name}.csv"
    path.write_text(to_csv(result.records), encoding="utf-8")
    summary = out / f"{name}_summary.json"
    summary.write_text(json.dumps(_clean({"schema_version": SCHEMA_VERSION, **result.summary}),
                                  indent=1, allow_nan=False) + "\n", encoding="utf-8")
    return [path, summary]
