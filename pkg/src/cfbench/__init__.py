"""Benchmark harness for graph counterfactual explainers.

Generates or loads binary graph-classification datasets, fits black-box
oracles with exact prediction-call accounting, runs counterfactual
explainers over every instance, and scores them on seven metrics. All of
it is driven by JSON config files through a factory registry.
"""

from cfbench.graphs import GraphInstance, feature_count, flip_edge, ged, has_cycle

__version__ = "0.1.0"

__all__ = [
    "GraphInstance",
    "feature_count",
    "flip_edge",
    "ged",
    "has_cycle",
    "__version__",
]
