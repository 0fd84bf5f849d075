"""Black-box graph classifiers and their fit/load lifecycle.

Explainers only ever see an oracle through a counting handle, so the number
of queries they spend is an observable cost. The fitted models themselves
are tiny (a few floats or edge lists) and persist as JSON keyed by their
parameters and the training-set content hash.
"""

from __future__ import annotations

import json
import logging
import math
import os
from abc import ABC, abstractmethod
from pathlib import Path

from cfbench.datasets import Dataset, edge_probabilities, params_hash
from cfbench.graphs import (
    GraphInstance,
    connected_components,
    edge_slots,
    has_cycle,
    triangle_count,
)

log = logging.getLogger("cfbench")


class OracleError(ValueError):
    """Invalid oracle parameters or a stored model that does not match."""


FEATURE_NAMES = (
    "num_nodes",
    "num_edges",
    "mean_degree",
    "degree_variance",
    "triangles",
    "components",
    "has_cycle",
)


def structural_features(g: GraphInstance) -> list[float]:
    """Fixed-length numeric summary of a graph's shape.

    The entries follow FEATURE_NAMES: vertex and edge counts, first two
    moments of the degree sequence, triangle count, connected component
    count, and a cycle indicator.
    """
    n = g.num_nodes
    degrees = [len(nbrs) for nbrs in g.adjacency()]
    mean_deg = math.fsum(degrees) / n if n else 0.0
    var_deg = math.fsum((d - mean_deg) ** 2 for d in degrees) / n if n else 0.0
    return [
        float(n),
        float(g.num_edges),
        mean_deg,
        var_deg,
        float(triangle_count(g)),
        float(connected_components(g)),
        1.0 if has_cycle(g) else 0.0,
    ]


class Oracle(ABC):
    """A fitted two-class graph classifier."""

    name: str
    params: dict

    @abstractmethod
    def classify(self, g: GraphInstance) -> int:
        """Predicted class in {0, 1}. Does not touch any call counter."""

    @abstractmethod
    def to_json_obj(self) -> dict:
        """JSON-serializable snapshot sufficient to rebuild the model."""


class CountingOracle:
    """Oracle handle that counts every query made through it.

    Each worker gets its own handle, so no locking is needed; the runner
    sums the per-handle counts afterwards.
    """

    def __init__(self, base: Oracle):
        self.base = base
        self.calls = 0

    def predict(self, g: GraphInstance) -> int:
        self.calls += 1
        return self.base.classify(g)


class NearestCentroidOracle(Oracle):
    """Classifies by distance to per-class centroids of structural features.

    Features are standardized with the training set's per-feature mean and
    population standard deviation; constant features (std 0) carry no
    information and are skipped. Distance ties go to class 0.
    """

    name = "nearest-centroid"

    def __init__(
        self,
        params: dict,
        means: list[float],
        stds: list[float],
        centroids: list[list[float]],
    ):
        self.params = dict(params)
        self.means = list(means)
        self.stds = list(stds)
        self.centroids = [list(c) for c in centroids]
        k = len(FEATURE_NAMES)
        if not (len(means) == len(stds) == len(centroids[0]) == len(centroids[1]) == k):
            raise OracleError("model vectors do not match the feature count")

    @classmethod
    def fit(cls, params: dict, dataset: Dataset) -> "NearestCentroidOracle":
        dataset.require_both_classes()
        rows = [structural_features(inst) for inst in dataset.instances]
        n = len(rows)
        k = len(FEATURE_NAMES)
        means = [math.fsum(r[j] for r in rows) / n for j in range(k)]
        stds = [
            math.sqrt(math.fsum((r[j] - means[j]) ** 2 for r in rows) / n)
            for j in range(k)
        ]
        centroids = []
        for cls_label in (0, 1):
            members = [r for r, inst in zip(rows, dataset.instances) if inst.label == cls_label]
            centroids.append(
                [math.fsum(r[j] for r in members) / len(members) for j in range(k)]
            )
        return cls(params, means, stds, centroids)

    def classify(self, g: GraphInstance) -> int:
        x = structural_features(g)
        dists = []
        for c in self.centroids:
            sq = []
            for j in range(len(x)):
                if self.stds[j] == 0.0:
                    continue
                dz = (x[j] - c[j]) / self.stds[j]
                sq.append(dz * dz)
            dists.append(math.fsum(sq))
        return 0 if dists[0] <= dists[1] else 1

    def to_json_obj(self) -> dict:
        return {
            "oracle": self.name,
            "params": self.params,
            "means": self.means,
            "stds": self.stds,
            "centroids": self.centroids,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "NearestCentroidOracle":
        return cls(obj["params"], obj["means"], obj["stds"], obj["centroids"])


class EdgeRuleOracle(Oracle):
    """Votes with the k most class-discriminative edge slots per class.

    Fitting ranks every slot of the (fixed) vertex set by the difference of
    empirical per-class edge frequencies; the top k for each direction form
    two indicator sets. A graph is classified by which set it overlaps
    more, with ties going to class 0. Only defined for datasets whose
    instances share one vertex count.
    """

    name = "edge-rule"

    def __init__(self, params: dict, num_nodes: int, slots0: list, slots1: list):
        self.params = dict(params)
        self.num_nodes = num_nodes
        self.slots0 = frozenset(tuple(s) for s in slots0)
        self.slots1 = frozenset(tuple(s) for s in slots1)

    @classmethod
    def fit(cls, params: dict, dataset: Dataset) -> "EdgeRuleOracle":
        dataset.require_both_classes()
        k = params.get("k", 10)
        if not isinstance(k, int) or k < 1:
            raise OracleError(f"k must be a positive integer, got {k!r}")
        table = edge_probabilities(dataset)
        slots = edge_slots(table.num_nodes)
        if k > len(slots):
            raise OracleError(f"k={k} exceeds the {len(slots)} available edge slots")
        # Ties in the frequency difference break on slot order, so the fitted
        # rule never depends on dict iteration order.
        by_class0 = sorted(slots, key=lambda s: (-(table.get(s)[0] - table.get(s)[1]), s))
        by_class1 = sorted(slots, key=lambda s: (-(table.get(s)[1] - table.get(s)[0]), s))
        return cls(params, table.num_nodes, by_class0[:k], by_class1[:k])

    def classify(self, g: GraphInstance) -> int:
        count0 = len(g.edges & self.slots0)
        count1 = len(g.edges & self.slots1)
        return 0 if count0 >= count1 else 1

    def to_json_obj(self) -> dict:
        return {
            "oracle": self.name,
            "params": self.params,
            "num_nodes": self.num_nodes,
            "slots0": sorted(list(s) for s in self.slots0),
            "slots1": sorted(list(s) for s in self.slots1),
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "EdgeRuleOracle":
        return cls(obj["params"], obj["num_nodes"], obj["slots0"], obj["slots1"])


ORACLE_TYPES: dict[str, type[Oracle]] = {
    NearestCentroidOracle.name: NearestCentroidOracle,
    EdgeRuleOracle.name: EdgeRuleOracle,
}


def oracle_accuracy(oracle: Oracle, dataset: Dataset) -> float:
    """Fraction of instances whose prediction matches the stored label."""
    hits = sum(1 for inst in dataset.instances if oracle.classify(inst) == inst.label)
    return hits / len(dataset)


def model_path(name: str, params: dict, dataset: Dataset, model_dir: str | Path) -> Path:
    ds_hash = dataset.content_hash()[:12]
    return Path(model_dir) / f"{name}-{params_hash(params)}-{ds_hash}.json"


def ensure_oracle(
    name: str, params: dict, dataset: Dataset, model_dir: str | Path
) -> Oracle:
    """Load the fitted model for (name, params, dataset) or fit and store it."""
    if name not in ORACLE_TYPES:
        raise OracleError(
            f"unknown oracle {name!r}; known: {', '.join(sorted(ORACLE_TYPES))}"
        )
    cls = ORACLE_TYPES[name]
    path = model_path(name, params, dataset, model_dir)
    if path.exists():
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
        if obj.get("oracle") != name or obj.get("params") != params:
            raise OracleError(
                f"{path}: stored model is {obj.get('oracle')!r} with params "
                f"{obj.get('params')}, requested {name!r} with {params}"
            )
        log.info("loaded oracle %s from %s", name, path)
        return cls.from_json_obj(obj)
    oracle = cls.fit(params, dataset)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(oracle.to_json_obj(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)
    log.info("fitted oracle %s -> %s", name, path)
    return oracle
