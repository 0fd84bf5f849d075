"""Counterfactual search strategies behind a single explain() contract.

Three strategies ship by default:

* dataset search: return the nearest dataset instance the oracle assigns
  to the other class (distance = graph edit distance, ties to the smallest
  instance id);
* oblivious bidirectional search: flip random edge slots until the
  predicted class changes, then greedily revert edits that are not needed
  to keep it changed;
* data-driven bidirectional search: same two stages, but forward flips are
  ordered by how strongly each slot's presence disagrees with the target
  class's empirical edge frequency.

All oracle access goes through a counting handle, so every explanation
reports exactly how many queries it spent.
"""

from __future__ import annotations

import random
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, replace

from cfbench.datasets import Dataset, EdgeProbabilityTable, edge_probabilities
from cfbench.graphs import Edge, GraphInstance, edge_slots, flip_edge, ged
from cfbench.oracles import CountingOracle


class ExplainerError(ValueError):
    """Invalid search parameters or an instance the strategy cannot handle."""


@dataclass(frozen=True)
class SearchBudget:
    """Termination controls for the flip-based searches."""

    max_forward_flips: int
    max_backward_passes: int = 5
    rng_seed: int = 0

    def __post_init__(self):
        if self.max_forward_flips < 1:
            raise ExplainerError(
                f"max_forward_flips must be positive, got {self.max_forward_flips}"
            )
        if self.max_backward_passes < 1:
            raise ExplainerError(
                f"max_backward_passes must be positive, got {self.max_backward_passes}"
            )


@dataclass(frozen=True)
class Explanation:
    """Outcome of one counterfactual search on one instance.

    ``found`` is true iff the counterfactual's predicted class differs from
    the input's. When the search fails, ``counterfactual`` is the input
    instance itself, unchanged. For the flip-based searches ``edit_trace``
    lists the surviving flips in the order they were applied; the dataset
    search leaves it empty.
    """

    original_id: int
    counterfactual: GraphInstance
    found: bool
    oracle_calls: int
    wall_time_s: float
    edit_trace: tuple[Edge, ...] = ()


def explain_dce(g: GraphInstance, o: CountingOracle, d: Dataset) -> Explanation:
    """Nearest opposite-predicted dataset instance.

    Always classifies g plus every dataset instance (N+1 queries); there is
    no early exit, so the call count is a fixed function of the dataset
    size. Ties on distance go to the smallest instance id.
    """
    t0 = time.perf_counter()
    start = o.calls
    pred_g = o.predict(g)
    best_key: tuple[int, int] | None = None
    best: GraphInstance | None = None
    for inst in d.instances:
        if o.predict(inst) == pred_g:
            continue
        key = (ged(g, inst), inst.id)
        if best_key is None or key < best_key:
            best_key, best = key, inst
    if best is None:
        return Explanation(g.id, g, False, o.calls - start, time.perf_counter() - t0)
    cf = replace(best, label=1 - pred_g)
    return Explanation(g.id, cf, True, o.calls - start, time.perf_counter() - t0)


def backward_pass(
    current: GraphInstance,
    original_class: int,
    edits: list[Edge],
    o: CountingOracle,
    rng: random.Random,
) -> tuple[GraphInstance, list[Edge]]:
    """One revert sweep: drop every edit the flipped class survives without.

    Candidates are visited in random order; a revert is kept only if the
    prediction stays different from ``original_class``. Reverting the sole
    remaining edit would reconstruct the original graph, whose class is
    already known, so that candidate is rejected without a query. The
    returned edit list preserves the forward application order.
    """
    edits = list(edits)
    order = list(edits)
    rng.shuffle(order)
    for e in order:
        if len(edits) <= 1:
            break
        tentative = flip_edge(current, *e)
        if o.predict(tentative) != original_class:
            current = tentative
            edits.remove(e)
    return current, edits


def _shrink(
    current: GraphInstance,
    original_class: int,
    edits: list[Edge],
    o: CountingOracle,
    rng: random.Random,
    max_passes: int,
) -> tuple[GraphInstance, list[Edge]]:
    """Repeat backward passes until one keeps every edit or the cap hits."""
    for _ in range(max_passes):
        before = len(edits)
        current, edits = backward_pass(current, original_class, edits, o, rng)
        if len(edits) == before:
            break
    return current, edits


def _forward_walk(
    g: GraphInstance,
    order: list[Edge],
    pred_g: int,
    o: CountingOracle,
    budget: SearchBudget,
) -> tuple[GraphInstance, list[Edge], bool]:
    """Flip slots in the given order until the class changes or budget ends."""
    current = g
    edits: list[Edge] = []
    for slot in order[: budget.max_forward_flips]:
        current = flip_edge(current, *slot)
        edits.append(slot)
        if o.predict(current) != pred_g:
            return current, edits, True
    return current, edits, False


def explain_obs(g: GraphInstance, o: CountingOracle, budget: SearchBudget) -> Explanation:
    """Random-order edge flips, then the shared backward shrink."""
    if g.num_nodes < 2:
        raise ExplainerError(f"need at least 2 nodes to flip an edge, got {g.num_nodes}")
    t0 = time.perf_counter()
    start = o.calls
    rng = random.Random(budget.rng_seed)
    pred_g = o.predict(g)
    order = edge_slots(g.num_nodes)
    rng.shuffle(order)
    current, edits, found = _forward_walk(g, order, pred_g, o, budget)
    if not found:
        return Explanation(g.id, g, False, o.calls - start, time.perf_counter() - t0)
    current, edits = _shrink(current, pred_g, edits, o, rng, budget.max_backward_passes)
    cf = replace(current, label=1 - pred_g)
    return Explanation(
        g.id, cf, True, o.calls - start, time.perf_counter() - t0, tuple(edits)
    )


def explain_dbs(
    g: GraphInstance,
    o: CountingOracle,
    table: EdgeProbabilityTable,
    budget: SearchBudget,
) -> Explanation:
    """Frequency-guided edge flips, then the shared backward shrink.

    Each slot is scored once against the target class: |x_e - p(e)|, where
    x_e marks presence in g and p(e) is the slot's empirical frequency in
    the class the search wants to reach. Slots are flipped in descending
    score; ties fall back to lexicographic slot order, which makes the
    forward stage fully deterministic.
    """
    if g.num_nodes != table.num_nodes:
        raise ExplainerError(
            f"instance has {g.num_nodes} nodes but the frequency table covers "
            f"{table.num_nodes}"
        )
    t0 = time.perf_counter()
    start = o.calls
    rng = random.Random(budget.rng_seed)
    pred_g = o.predict(g)
    target = 1 - pred_g

    def score(slot: Edge) -> float:
        x = 1.0 if g.has_edge(*slot) else 0.0
        return abs(x - table.get(slot)[target])

    order = sorted(edge_slots(g.num_nodes), key=lambda s: (-score(s), s))
    current, edits, found = _forward_walk(g, order, pred_g, o, budget)
    if not found:
        return Explanation(g.id, g, False, o.calls - start, time.perf_counter() - t0)
    current, edits = _shrink(current, pred_g, edits, o, rng, budget.max_backward_passes)
    cf = replace(current, label=1 - pred_g)
    return Explanation(
        g.id, cf, True, o.calls - start, time.perf_counter() - t0, tuple(edits)
    )


class Explainer(ABC):
    """Named, parameterized strategy the harness drives over a dataset."""

    name: str

    def __init__(self, params: dict | None = None):
        self.params = dict(params or {})

    @abstractmethod
    def explain(
        self, g: GraphInstance, o: CountingOracle, dataset: Dataset, rng_seed: int
    ) -> Explanation:
        ...

    def _budget(self, g: GraphInstance, rng_seed: int) -> SearchBudget:
        max_flips = self.params.get("max_forward_flips")
        if max_flips is None:
            max_flips = len(edge_slots(g.num_nodes))
        return SearchBudget(
            max_forward_flips=max_flips,
            max_backward_passes=self.params.get("max_backward_passes", 5),
            rng_seed=rng_seed,
        )


class DatasetSearchExplainer(Explainer):
    name = "dce"

    def explain(self, g, o, dataset, rng_seed):
        return explain_dce(g, o, dataset)


class ObliviousSearchExplainer(Explainer):
    name = "obs"

    def explain(self, g, o, dataset, rng_seed):
        return explain_obs(g, o, self._budget(g, rng_seed))


class DataDrivenSearchExplainer(Explainer):
    name = "dbs"

    def __init__(self, params: dict | None = None):
        super().__init__(params)
        self._table: EdgeProbabilityTable | None = None
        self._table_source: Dataset | None = None

    def explain(self, g, o, dataset, rng_seed):
        # The table depends only on the dataset; computing it once is safe
        # even under threads because every recomputation yields equal values.
        if self._table is None or self._table_source is not dataset:
            self._table = edge_probabilities(dataset)
            self._table_source = dataset
        return explain_dbs(g, o, self._table, self._budget(g, rng_seed))
