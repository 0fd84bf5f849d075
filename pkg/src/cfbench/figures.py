"""Plots for a finished run: metric means and the GED distribution.

matplotlib is imported lazily with the Agg backend so headless runs and
library users who never plot pay nothing for it.
"""

from __future__ import annotations

from pathlib import Path

from cfbench.metrics import METRIC_COLUMNS, METRIC_NAMES
from cfbench.report import MARKDOWN_LABELS, RunReport


def render_figures(report: RunReport, out_dir: str | Path) -> list[Path]:
    """Write metric_means.png and ged_by_explainer.png; returns the paths."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    explainers = list(report.aggregates)
    selected = [
        m for m in METRIC_NAMES if m in report.config.get("metric_names", METRIC_NAMES)
    ]
    paths = []

    fig, axes = plt.subplots(
        1, len(selected), figsize=(2.2 * len(selected) + 1, 3.2), squeeze=False
    )
    for ax, metric in zip(axes[0], selected):
        values = [report.aggregates[e].means[METRIC_COLUMNS[metric]] for e in explainers]
        ax.bar(range(len(explainers)), values, color="tab:blue")
        ax.set_xticks(range(len(explainers)))
        ax.set_xticklabels(explainers, rotation=45, ha="right", fontsize=8)
        ax.set_title(MARKDOWN_LABELS[metric], fontsize=9)
        ax.tick_params(labelsize=8)
    fig.suptitle(f"Mean metrics per explainer ({report.run_id})", fontsize=10)
    fig.tight_layout()
    path = out_dir / "metric_means.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    paths.append(path)

    fig, ax = plt.subplots(figsize=(1.6 * len(explainers) + 2, 3.5))
    data = [[r.ged for r in report.records[e]] for e in explainers]
    ax.boxplot(data, tick_labels=explainers)
    ax.set_ylabel("graph edit distance")
    ax.set_title(f"GED per explainer ({report.run_id})", fontsize=10)
    fig.tight_layout()
    path = out_dir / "ged_by_explainer.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    paths.append(path)
    return paths
