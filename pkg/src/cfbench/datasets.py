"""Dataset container, synthetic generators, edge statistics, and persistence.

Datasets are JSON-lines files: a header object followed by one canonical
instance object per line, so files are diff-able and byte-stable for a
fixed (params, seed) pair. Generation happens only when no stored file
matches the requested spec ("fit or load").
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import random
from dataclasses import dataclass, field
from pathlib import Path

from cfbench.graphs import Edge, GraphInstance, edge_slots, has_cycle, ordered_pair

log = logging.getLogger("cfbench")


class DatasetError(ValueError):
    """Invalid dataset contents, parameters, or spec/file mismatch."""


@dataclass(frozen=True)
class Dataset:
    """Ordered collection of graph instances with ids 0..N-1."""

    name: str
    instances: tuple[GraphInstance, ...]
    generation_params: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "instances", tuple(self.instances))
        for pos, inst in enumerate(self.instances):
            if inst.id != pos:
                raise DatasetError(
                    f"instance at position {pos} has id {inst.id}; ids must be 0..N-1 in order"
                )

    def __len__(self) -> int:
        return len(self.instances)

    def class_counts(self) -> tuple[int, int]:
        c1 = sum(inst.label for inst in self.instances)
        return len(self.instances) - c1, c1

    def require_both_classes(self) -> None:
        c0, c1 = self.class_counts()
        if c0 == 0 or c1 == 0:
            raise DatasetError(
                f"single-class dataset: {c0} instances of class 0, {c1} of class 1"
            )

    def common_num_nodes(self) -> int:
        """Shared vertex count; raises if instances differ in size."""
        sizes = {inst.num_nodes for inst in self.instances}
        if len(sizes) != 1:
            raise DatasetError(f"instances have mixed num_nodes: {sorted(sizes)}")
        return sizes.pop()

    def content_hash(self) -> str:
        """Hash of the canonical instance lines; insensitive to name/params."""
        h = hashlib.sha256()
        for inst in self.instances:
            h.update(_canonical_json(inst.to_json_obj()).encode("utf-8"))
            h.update(b"\n")
        return h.hexdigest()


@dataclass(frozen=True)
class EdgeProbabilityTable:
    """Per-class empirical edge frequencies over a fixed-node dataset.

    ``prob`` maps (u, v) slots to (p0, p1); slots that never appear in any
    instance are simply absent and read as (0.0, 0.0) through :meth:`get`.
    """

    num_nodes: int
    prob: dict[Edge, tuple[float, float]]

    def get(self, slot: Edge) -> tuple[float, float]:
        return self.prob.get(slot, (0.0, 0.0))


def edge_probabilities(d: Dataset) -> EdgeProbabilityTable:
    """Empirical per-class frequency of each edge slot.

    Requires every instance to share the same vertex count (the table is
    meaningless otherwise).
    """
    num_nodes = d.common_num_nodes()
    c0, c1 = d.class_counts()
    counts: dict[Edge, list[int]] = {}
    for inst in d.instances:
        for e in inst.edges:
            counts.setdefault(e, [0, 0])[inst.label] += 1
    prob = {
        e: (n0 / c0 if c0 else 0.0, n1 / c1 if c1 else 0.0)
        for e, (n0, n1) in counts.items()
    }
    return EdgeProbabilityTable(num_nodes=num_nodes, prob=prob)


# ---------------------------------------------------------------------------
# Generators


def random_tree_edges(num_nodes: int, rng: random.Random) -> set[Edge]:
    """Uniformly grown random tree: node i attaches to a random earlier node."""
    edges: set[Edge] = set()
    for i in range(1, num_nodes):
        edges.add((rng.randrange(i), i))
    return edges


def tree_instance(id: int, num_nodes: int, rng: random.Random) -> GraphInstance:
    """Acyclic class-0 instance: one random tree spanning all nodes."""
    return GraphInstance(id=id, num_nodes=num_nodes, edges=random_tree_edges(num_nodes, rng), label=0)


def tree_with_cycles_instance(
    id: int, num_nodes: int, max_cycles: int, rng: random.Random
) -> GraphInstance:
    """Class-1 instance: tree backbone plus 1..max_cycles attached cycle motifs.

    Each motif is a simple cycle of 3-6 fresh vertices joined to the
    already-built graph by a single edge. Motifs are trimmed to the node
    budget so the instance always has exactly ``num_nodes`` vertices; when
    the budget admits no backbone at all (num_nodes == 3) the instance
    degenerates to a single spanning cycle.
    """
    if num_nodes < 3:
        raise DatasetError(f"need at least 3 nodes to place a cycle, got {num_nodes}")
    k = rng.randint(1, max_cycles)
    sizes: list[int] = []
    budget = num_nodes - 1  # reserve one backbone node
    for _ in range(k):
        if budget < 3:
            break
        s = rng.randint(3, min(6, budget))
        sizes.append(s)
        budget -= s
    if not sizes:
        sizes = [num_nodes]
    backbone = num_nodes - sum(sizes)
    edges = random_tree_edges(backbone, rng)
    next_node = backbone
    for s in sizes:
        ring = list(range(next_node, next_node + s))
        for i in range(s):
            edges.add(ordered_pair(ring[i], ring[(i + 1) % s]))
        if next_node > 0:
            edges.add(ordered_pair(rng.randrange(next_node), ring[0]))
        next_node += s
    return GraphInstance(id=id, num_nodes=num_nodes, edges=edges, label=1)


def _draw_two_class_labels(n_instances: int, rng: random.Random) -> list[int]:
    """I.i.d. fair labels, redrawn until both classes appear."""
    if n_instances < 2:
        raise DatasetError(
            f"need at least 2 instances to cover both classes, got {n_instances}"
        )
    while True:
        labels = [int(rng.random() < 0.5) for _ in range(n_instances)]
        if 0 < sum(labels) < n_instances:
            return labels


def generate_tree_cycles(
    n_instances: int, nodes_per_instance: int, max_cycles: int, rng_seed: int
) -> Dataset:
    """Trees (class 0) vs trees with attached cycle motifs (class 1).

    Every instance has exactly ``nodes_per_instance`` vertices and its label
    equals the cycle predicate by construction.
    """
    if nodes_per_instance < 3:
        raise DatasetError(
            f"nodes_per_instance must be >= 3, got {nodes_per_instance}"
        )
    if max_cycles < 1:
        raise DatasetError(f"max_cycles must be >= 1, got {max_cycles}")
    rng = random.Random(rng_seed)
    labels = _draw_two_class_labels(n_instances, rng)
    instances = []
    for i, y in enumerate(labels):
        if y == 0:
            instances.append(tree_instance(i, nodes_per_instance, rng))
        else:
            instances.append(tree_with_cycles_instance(i, nodes_per_instance, max_cycles, rng))
    params = {
        "n": n_instances,
        "nodes": nodes_per_instance,
        "max_cycles": max_cycles,
        "seed": rng_seed,
    }
    return Dataset(name="tree-cycles", instances=tuple(instances), generation_params=params)


def generate_fixed_node_two_class(
    n_instances: int,
    num_nodes: int,
    base_density: float,
    n_discriminative: int,
    delta: float,
    rng_seed: int,
) -> Dataset:
    """Fixed-vertex-set graphs with a planted set of class-discriminative edges.

    Every edge slot is present with probability ``base_density`` except a
    fixed random subset of ``n_discriminative`` slots, whose probability is
    shifted by +delta for class 1 and -delta for class 0. Shifted
    probabilities are clamped to [0, 1], so a large delta on a sparse base
    density makes the discriminative slots (nearly) absent in class 0.
    """
    if num_nodes < 2:
        raise DatasetError(f"num_nodes must be >= 2, got {num_nodes}")
    slots = edge_slots(num_nodes)
    if not 0 <= n_discriminative <= len(slots):
        raise DatasetError(
            f"n_discriminative must be within 0..{len(slots)}, got {n_discriminative}"
        )
    if not 0.0 <= base_density <= 1.0:
        raise DatasetError(f"base_density must be in [0,1], got {base_density}")
    if not 0.0 <= delta <= 1.0:
        raise DatasetError(f"delta must be in [0,1], got {delta}")
    rng = random.Random(rng_seed)
    discriminative = set(rng.sample(slots, n_discriminative))
    p_up = min(1.0, base_density + delta)
    p_down = max(0.0, base_density - delta)
    labels = _draw_two_class_labels(n_instances, rng)
    instances = []
    for i, y in enumerate(labels):
        edges = set()
        for slot in slots:
            if slot in discriminative:
                p = p_up if y == 1 else p_down
            else:
                p = base_density
            if rng.random() < p:
                edges.add(slot)
        instances.append(GraphInstance(id=i, num_nodes=num_nodes, edges=edges, label=y))
    params = {
        "n": n_instances,
        "nodes": num_nodes,
        "base_density": base_density,
        "n_discriminative": n_discriminative,
        "delta": delta,
        "seed": rng_seed,
    }
    return Dataset(
        name="fixed-node-two-class", instances=tuple(instances), generation_params=params
    )


# ---------------------------------------------------------------------------
# Persistence


def _canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def save(d: Dataset, path: str | Path) -> Path:
    """Write the dataset as JSON lines, atomically (temp file then rename)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = {
        "name": d.name,
        "generation_params": d.generation_params,
        "n_instances": len(d),
    }
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(_canonical_json(header) + "\n")
        for inst in d.instances:
            fh.write(_canonical_json(inst.to_json_obj()) + "\n")
    os.replace(tmp, path)
    return path


def load(path: str | Path) -> Dataset:
    """Read a dataset file, validating schema and the two-class invariant."""
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line for line in fh.read().splitlines() if line.strip()]
    if not lines:
        raise DatasetError(f"{path}: empty dataset file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise DatasetError(f"{path}: malformed header: {exc}") from exc
    for key in ("name", "generation_params", "n_instances"):
        if key not in header:
            raise DatasetError(f"{path}: header missing field {key!r}")
    body = lines[1:]
    if len(body) != header["n_instances"]:
        raise DatasetError(
            f"{path}: header declares {header['n_instances']} instances, file has {len(body)}"
        )
    instances = []
    for pos, line in enumerate(body):
        try:
            obj = json.loads(line)
            inst = GraphInstance.from_json_obj(obj)
        except (json.JSONDecodeError, ValueError, TypeError, KeyError) as exc:
            raise DatasetError(f"{path}: instance {pos}: {exc}") from exc
        instances.append(inst)
    dataset = Dataset(
        name=header["name"],
        instances=tuple(instances),
        generation_params=header["generation_params"],
    )
    dataset.require_both_classes()
    return dataset


def params_hash(params: dict) -> str:
    """Short stable digest of a parameter record, used in cache file names."""
    return hashlib.sha256(_canonical_json(params).encode("utf-8")).hexdigest()[:12]


def _check_params(name: str, params: dict, required: dict) -> None:
    """Reject missing keys, unknown keys, and wrong parameter types."""
    missing = sorted(required.keys() - params.keys())
    if missing:
        raise DatasetError(f"dataset {name!r}: missing params: {', '.join(missing)}")
    extra = sorted(params.keys() - required.keys())
    if extra:
        raise DatasetError(f"dataset {name!r}: unknown params: {', '.join(extra)}")
    for key, type_ in required.items():
        value = params[key]
        if isinstance(value, bool) or not isinstance(value, type_):
            raise DatasetError(
                f"dataset {name!r}: param {key}={value!r} has the wrong type"
            )


def _build_tree_cycles(params: dict) -> Dataset:
    _check_params(
        "tree-cycles",
        params,
        {"n": int, "nodes": int, "max_cycles": int, "seed": int},
    )
    return generate_tree_cycles(params["n"], params["nodes"], params["max_cycles"], params["seed"])


def _build_fixed_node_two_class(params: dict) -> Dataset:
    _check_params(
        "fixed-node-two-class",
        params,
        {
            "n": int,
            "nodes": int,
            "base_density": (int, float),
            "n_discriminative": int,
            "delta": (int, float),
            "seed": int,
        },
    )
    return generate_fixed_node_two_class(
        params["n"],
        params["nodes"],
        float(params["base_density"]),
        params["n_discriminative"],
        float(params["delta"]),
        params["seed"],
    )


GENERATORS = {
    "tree-cycles": _build_tree_cycles,
    "fixed-node-two-class": _build_fixed_node_two_class,
}


def ensure_dataset(name: str, params: dict, data_dir: str | Path, path: str | Path | None = None) -> Dataset:
    """Load the dataset matching (name, params) or generate and store it.

    The cache path defaults to ``<data_dir>/<name>/<params-hash>.jsonl``. A
    stored file whose generation_params differ from the request is a config
    error, never silently reused.
    """
    if name not in GENERATORS:
        raise DatasetError(
            f"unknown dataset {name!r}; known: {', '.join(sorted(GENERATORS))}"
        )
    target = Path(path) if path is not None else Path(data_dir) / name / f"{params_hash(params)}.jsonl"
    if target.exists():
        dataset = load(target)
        if dataset.generation_params != params:
            raise DatasetError(
                f"{target}: stored generation_params {dataset.generation_params} "
                f"do not match requested params {params}"
            )
        log.info("loaded dataset %s from %s", name, target)
        return dataset
    dataset = GENERATORS[name](params)
    dataset.require_both_classes()
    save(dataset, target)
    log.info("generated dataset %s (%d instances) -> %s", name, len(dataset), target)
    return dataset
