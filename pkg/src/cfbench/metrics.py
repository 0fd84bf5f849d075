"""Per-instance evaluation metrics and their aggregation.

Seven quantities are recorded for every (explainer, instance) pair:
runtime, graph edit distance, oracle calls, correctness, sparsity,
fidelity, and oracle accuracy. A companion edit_ratio column (distance
divided by graph size) is always kept alongside sparsity because the two
are complementary: sparsity + edit_ratio = 1 on every record.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from cfbench.explainers import Explanation
from cfbench.graphs import GraphInstance, feature_count, ged

METRIC_NAMES = (
    "runtime",
    "ged",
    "calls",
    "correctness",
    "sparsity",
    "fidelity",
    "oracle_accuracy",
)

# metric identifier -> EvaluationRecord attribute
METRIC_COLUMNS = {
    "runtime": "runtime_s",
    "ged": "ged",
    "calls": "calls",
    "correctness": "correctness",
    "sparsity": "sparsity",
    "fidelity": "fidelity",
    "oracle_accuracy": "oracle_correct",
}


def correctness(pred_g: int, pred_cf: int) -> int:
    """1 iff the counterfactual's predicted class differs from the input's."""
    return int(pred_g != pred_cf)


def sparsity(ged_value: float, g: GraphInstance) -> float:
    """1 - D/|G| with |G| = nodes + edges. Deliberately not clamped: a
    counterfactual farther away than the graph is large goes negative."""
    size = feature_count(g)
    if size <= 0:
        raise ValueError("sparsity needs a non-empty graph")
    return 1.0 - ged_value / size


def edit_ratio(ged_value: float, g: GraphInstance) -> float:
    """D/|G|, the complement of sparsity; 0 means an untouched graph."""
    size = feature_count(g)
    if size <= 0:
        raise ValueError("edit_ratio needs a non-empty graph")
    return ged_value / size


def fidelity(pred_g: int, pred_cf: int, y_g: int) -> int:
    """Indicator difference I(pred_g = y) - I(pred_cf = y), in {-1, 0, 1}."""
    return int(pred_g == y_g) - int(pred_cf == y_g)


def oracle_accuracy(pred_g: int, y_g: int) -> int:
    """1 iff the oracle agrees with the stored ground-truth label."""
    return int(pred_g == y_g)


@dataclass(frozen=True)
class EvaluationRecord:
    """One row of the benchmark: all metrics for one explained instance."""

    explainer: str
    instance_id: int
    runtime_s: float
    ged: int
    calls: int
    correctness: int
    sparsity: float
    edit_ratio: float
    fidelity: int
    oracle_correct: int
    found: bool
    error: str | None = None

    def to_json_obj(self) -> dict:
        return {
            "explainer": self.explainer,
            "instance_id": self.instance_id,
            "runtime_s": self.runtime_s,
            "ged": self.ged,
            "calls": self.calls,
            "correctness": self.correctness,
            "sparsity": self.sparsity,
            "edit_ratio": self.edit_ratio,
            "fidelity": self.fidelity,
            "oracle_correct": self.oracle_correct,
            "found": self.found,
            "error": self.error,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "EvaluationRecord":
        return cls(**obj)


def evaluate_record(
    g: GraphInstance,
    expl: Explanation,
    pred_g: int,
    pred_cf: int,
    explainer_name: str,
) -> EvaluationRecord:
    """Assemble the full metric row for one explanation.

    The distance is recomputed here from the graphs rather than trusted
    from the explainer, so a buggy edit trace cannot skew the benchmark.
    """
    d = ged(g, expl.counterfactual)
    return EvaluationRecord(
        explainer=explainer_name,
        instance_id=g.id,
        runtime_s=expl.wall_time_s,
        ged=d,
        calls=expl.oracle_calls,
        correctness=correctness(pred_g, pred_cf),
        sparsity=sparsity(d, g),
        edit_ratio=edit_ratio(d, g),
        fidelity=fidelity(pred_g, pred_cf, g.label),
        oracle_correct=oracle_accuracy(pred_g, g.label),
        found=expl.found,
    )


NUMERIC_COLUMNS = (
    "runtime_s",
    "ged",
    "calls",
    "correctness",
    "sparsity",
    "edit_ratio",
    "fidelity",
    "oracle_correct",
)


@dataclass(frozen=True)
class AggregateRow:
    """Arithmetic means of every numeric column for one explainer."""

    explainer: str
    n: int
    means: dict[str, float]

    def to_json_obj(self) -> dict:
        return {"explainer": self.explainer, "n": self.n, "means": dict(self.means)}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "AggregateRow":
        return cls(obj["explainer"], obj["n"], dict(obj["means"]))


def aggregate(records: list[EvaluationRecord]) -> AggregateRow:
    """Mean of each numeric column; exact under reordering (compensated sum)."""
    if not records:
        raise ValueError("cannot aggregate an empty record list")
    names = {r.explainer for r in records}
    if len(names) != 1:
        raise ValueError(f"records mix explainers: {sorted(names)}")
    n = len(records)
    means = {
        col: math.fsum(getattr(r, col) for r in records) / n for col in NUMERIC_COLUMNS
    }
    return AggregateRow(explainer=names.pop(), n=n, means=means)
