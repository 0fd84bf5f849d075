"""Factory registry: components are created by (kind, name), never by class.

Four kinds exist: dataset, oracle, explainer, metric. Datasets and oracles
resolve to lightweight spec handles (they need a directory and, for
oracles, a training set before anything concrete exists); explainers
resolve to ready strategy objects; metrics resolve to their record column.
New components can be added at import time with :func:`register`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from cfbench import datasets, metrics, oracles
from cfbench.explainers import (
    DataDrivenSearchExplainer,
    DatasetSearchExplainer,
    ObliviousSearchExplainer,
)

KINDS = ("dataset", "oracle", "explainer", "metric")


class RegistryError(ValueError):
    """Unknown component name, unknown kind, or duplicate registration."""


@dataclass(frozen=True)
class DatasetSpec:
    """Deferred dataset: generated or loaded once a data directory is known."""

    name: str
    params: dict = field(default_factory=dict)

    def materialize(self, data_dir: str | Path, path: str | Path | None = None) -> datasets.Dataset:
        return datasets.ensure_dataset(self.name, self.params, data_dir, path)


@dataclass(frozen=True)
class OracleSpec:
    """Deferred oracle: fitted or loaded once the training set is known."""

    name: str
    params: dict = field(default_factory=dict)

    def materialize(self, dataset: datasets.Dataset, model_dir: str | Path) -> oracles.Oracle:
        return oracles.ensure_oracle(self.name, self.params, dataset, model_dir)


_registry: dict[str, dict[str, Callable]] = {kind: {} for kind in KINDS}


def register(kind: str, name: str, builder: Callable) -> None:
    """Add a builder under (kind, name); registering a taken slot is an error."""
    if kind not in _registry:
        raise RegistryError(f"unknown kind {kind!r}; known: {', '.join(KINDS)}")
    if name in _registry[kind]:
        raise RegistryError(f"duplicate registration for {kind} {name!r}")
    _registry[kind][name] = builder


def unregister(kind: str, name: str) -> None:
    """Remove a registration (mainly for tests adding throwaway components)."""
    if kind in _registry and name in _registry[kind]:
        del _registry[kind][name]


def names(kind: str) -> list[str]:
    """Registered names for a kind, in registration order."""
    if kind not in _registry:
        raise RegistryError(f"unknown kind {kind!r}; known: {', '.join(KINDS)}")
    return list(_registry[kind])


def create(kind: str, name: str, params: dict | None = None):
    """Build the component registered under (kind, name)."""
    if kind not in _registry:
        raise RegistryError(f"unknown kind {kind!r}; known: {', '.join(KINDS)}")
    if name not in _registry[kind]:
        raise RegistryError(
            f"unknown component {name!r}; known: {', '.join(_registry[kind])}"
        )
    return _registry[kind][name](params or {})


def _register_defaults() -> None:
    register("dataset", "tree-cycles", lambda p: DatasetSpec("tree-cycles", p))
    register(
        "dataset",
        "fixed-node-two-class",
        lambda p: DatasetSpec("fixed-node-two-class", p),
    )
    register("oracle", "nearest-centroid", lambda p: OracleSpec("nearest-centroid", p))
    register("oracle", "edge-rule", lambda p: OracleSpec("edge-rule", p))
    register("explainer", "dce", DatasetSearchExplainer)
    register("explainer", "obs", ObliviousSearchExplainer)
    register("explainer", "dbs", DataDrivenSearchExplainer)
    for metric_name in metrics.METRIC_NAMES:
        column = metrics.METRIC_COLUMNS[metric_name]
        register("metric", metric_name, lambda p, column=column: column)


_register_defaults()
