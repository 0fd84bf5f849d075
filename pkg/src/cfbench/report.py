"""Run results: the RunReport container and its file renderings.

A run directory holds records.csv (one row per explained instance, fixed
column order), report.json (everything, round-trippable), report.md (the
aggregate table, one row per explainer), and optionally figures/. All
files are written atomically: temp file in the same directory, then
rename.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass
from pathlib import Path

from cfbench.metrics import METRIC_COLUMNS, METRIC_NAMES, AggregateRow, EvaluationRecord

CSV_COLUMNS = (
    "run_id",
    "explainer",
    "instance_id",
    "runtime_s",
    "ged",
    "calls",
    "correctness",
    "sparsity",
    "edit_ratio",
    "fidelity",
    "oracle_correct",
    "found",
)

# metric identifier -> header used in the markdown aggregate table
MARKDOWN_LABELS = {
    "runtime": "t(s)",
    "ged": "GED",
    "calls": "#Calls",
    "correctness": "C",
    "sparsity": "S",
    "fidelity": "F",
    "oracle_accuracy": "Acc",
}


@dataclass(frozen=True)
class RunReport:
    """Everything a finished run produced, in memory."""

    run_id: str
    config: dict
    environment: dict
    total_wall_time_s: float
    records: dict[str, tuple[EvaluationRecord, ...]]
    aggregates: dict[str, AggregateRow]

    def to_json_obj(self) -> dict:
        return {
            "run_id": self.run_id,
            "config": self.config,
            "environment": self.environment,
            "total_wall_time_s": self.total_wall_time_s,
            "records": {
                name: [r.to_json_obj() for r in recs]
                for name, recs in self.records.items()
            },
            "aggregates": {
                name: agg.to_json_obj() for name, agg in self.aggregates.items()
            },
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "RunReport":
        return cls(
            run_id=obj["run_id"],
            config=obj["config"],
            environment=obj["environment"],
            total_wall_time_s=obj["total_wall_time_s"],
            records={
                name: tuple(EvaluationRecord.from_json_obj(r) for r in rows)
                for name, rows in obj["records"].items()
            },
            aggregates={
                name: AggregateRow.from_json_obj(a)
                for name, a in obj["aggregates"].items()
            },
        )


def load_report(path: str | Path) -> RunReport:
    with open(path, "r", encoding="utf-8") as fh:
        return RunReport.from_json_obj(json.load(fh))


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_csv(report: RunReport) -> str:
    """Per-instance records under the fixed column order."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for recs in report.records.values():
        for r in recs:
            row = dict(r.to_json_obj(), run_id=report.run_id)
            writer.writerow(_cell(row[col]) for col in CSV_COLUMNS)
    return buf.getvalue()


def _fmt_mean(value: float) -> str:
    text = f"{value:.4f}".rstrip("0").rstrip(".")
    return text if text not in ("", "-0") else "0"


def render_markdown(report: RunReport) -> str:
    """Aggregate table: one explainer per row, selected metrics as columns."""
    selected = [m for m in METRIC_NAMES if m in report.config.get("metric_names", METRIC_NAMES)]
    header = ["Exp."] + [MARKDOWN_LABELS[m] for m in selected]
    lines = [
        "| " + " | ".join(header) + " |",
        "|" + "|".join(" --- " for _ in header) + "|",
    ]
    for name, agg in report.aggregates.items():
        cells = [name] + [_fmt_mean(agg.means[METRIC_COLUMNS[m]]) for m in selected]
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def render_json(report: RunReport) -> str:
    return json.dumps(report.to_json_obj(), indent=2, sort_keys=True) + "\n"


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_report(
    report: RunReport,
    formats: tuple[str, ...],
    out_dir: str | Path,
    figures: bool = False,
) -> dict[str, Path]:
    """Render the requested formats into out_dir; returns written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths: dict[str, Path] = {}
    if "csv" in formats:
        paths["csv"] = out_dir / "records.csv"
        _write_atomic(paths["csv"], render_csv(report))
    if "json" in formats:
        paths["json"] = out_dir / "report.json"
        _write_atomic(paths["json"], render_json(report))
    if "markdown" in formats:
        paths["markdown"] = out_dir / "report.md"
        _write_atomic(paths["markdown"], render_markdown(report))
    if figures:
        from cfbench.figures import render_figures

        for p in render_figures(report, out_dir / "figures"):
            paths[p.stem] = p
    return paths
