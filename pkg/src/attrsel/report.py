"""Machine-readable reports (JSON or CSV) for selection, PCA and correlation runs."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any

from .cfs import SelectionReport
from .correlate import CorrelationStructure
from .pca import PcaResult

SCHEMA_VERSION = 1

SELECTION_COLUMNS = ("rank", "attribute", "merit", "abs_r_cf", "selected", "above_threshold")
SPECTRUM_COLUMNS = ("component", "eigenvalue", "proportion", "cumulative", "retained")


@dataclass
class Table:
    name: str
    columns: tuple[str, ...]
    rows: list[tuple[Any, ...]]


@dataclass
class Report:
    command: str
    meta: dict[str, Any] = field(default_factory=dict)
    tables: list[Table] = field(default_factory=list)


def selection_table(sel: SelectionReport) -> Table:
    rows = [
        (r.rank, r.name, r.merit, r.abs_r_cf, r.selected, r.above_threshold)
        for r in sorted(sel.ranking, key=lambda r: r.rank)
    ]
    return Table("ranking", SELECTION_COLUMNS, rows)


def selection_report(sel: SelectionReport, meta: dict[str, Any] | None = None) -> Report:
    meta = dict(meta or {})
    meta.update(
        mode=sel.mode.value,
        direction=sel.direction.value,
        merit_threshold=sel.merit_threshold,
        subset_merit=sel.merit,
        n_attributes=len(sel.names),
        n_selected=sum(1 for r in sel.ranking if r.selected),
    )
    return Report(sel.mode.value, meta, [selection_table(sel)])


def pca_report(result: PcaResult, meta: dict[str, Any] | None = None) -> Report:
    meta = dict(meta or {})
    meta.update(
        pca_mode=result.mode.value,
        variance_threshold=result.threshold,
        k_for_threshold=result.k_for_threshold,
        total_variance=result.total_variance,
        dropped=list(result.dropped),
    )
    spectrum = [
        (f"PC{j + 1}", result.eigenvalues[j], result.proportions[j], result.cumulative[j], j < result.k_for_threshold)
        for j in range(result.n_components)
    ]
    pcs = tuple(f"PC{j + 1}" for j in range(result.n_components))
    loadings = [
        (name, *result.eigenvectors[i, :].tolist()) for i, name in enumerate(result.names)
    ]
    return Report(
        "pca",
        meta,
        [Table("spectrum", SPECTRUM_COLUMNS, spectrum), Table("loadings", ("attribute", *pcs), loadings)],
    )


def correlation_report(corr: CorrelationStructure, meta: dict[str, Any] | None = None) -> Report:
    """Lower-triangular matrix over the analysis attributes with the target last."""
    names, full = corr.full_matrix()
    rows = []
    for i, name in enumerate(names):
        rows.append((name, *(full[i, j] if j <= i else None for j in range(len(names)))))
    return Report("corr", dict(meta or {}), [Table("correlation", ("attribute", *names), rows)])


# -- emission ------------------------------------------------------------------


def _round(value: float, full_precision: bool) -> float | None:
    if math.isnan(value):
        return None
    value = float(value) + 0.0  # folds -0.0 into 0.0
    return value if full_precision else float(f"{value:.6g}")


def _json_value(value, full_precision: bool):
    if isinstance(value, bool) or value is None or isinstance(value, (str, int)):
        return value
    if isinstance(value, float) or hasattr(value, "__float__"):
        return _round(float(value), full_precision)
    if isinstance(value, (list, tuple)):
        return [_json_value(v, full_precision) for v in value]
    if isinstance(value, dict):
        return {k: _json_value(v, full_precision) for k, v in value.items()}
    return value


def _csv_value(value, full_precision: bool) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (str, int)):
        return str(value)
    rounded = _round(float(value), full_precision)
    if rounded is None:
        return ""
    return repr(rounded) if full_precision else f"{rounded:.6g}"


def emit_report(report: Report, fmt: str = "json", full_precision: bool = False) -> str:
    """Render ``report``.

    JSON is one document carrying ``schema_version``; floats keep six
    significant digits unless ``full_precision``.  CSV writes each table
    with a fixed header; multi-table reports prefix each table with a
    ``# <name>`` line and separate tables by a blank line.
    """
    if fmt == "json":
        doc: dict[str, Any] = {"schema_version": SCHEMA_VERSION, "command": report.command}
        doc.update(_json_value(report.meta, full_precision))
        doc["tables"] = {
            t.name: [
                {c: _json_value(v, full_precision) for c, v in zip(t.columns, row)} for row in t.rows
            ]
            for t in report.tables
        }
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"
    if fmt == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        multi = len(report.tables) > 1
        for n, t in enumerate(report.tables):
            if multi:
                if n:
                    out.write("\n")
                out.write(f"# {t.name}\n")
            writer.writerow(t.columns)
            for row in t.rows:
                writer.writerow([_csv_value(v, full_precision) for v in row])
        return out.getvalue()
    raise ValueError(f"unknown report format {fmt!r}")
