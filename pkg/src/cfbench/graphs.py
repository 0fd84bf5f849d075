"""Immutable undirected graph instances and the structural primitives built on them.

Everything downstream (generators, oracles, explainers, metrics) works in
terms of :class:`GraphInstance`. Instances are frozen after construction, so
they can be shared freely between concurrent evaluations.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Iterable

Edge = tuple[int, int]


def ordered_pair(u: int, v: int) -> Edge:
    """Canonical (min, max) form of an undirected edge."""
    return (u, v) if u < v else (v, u)


def edge_slots(num_nodes: int) -> list[Edge]:
    """All possible undirected edge slots on ``num_nodes`` vertices, lexicographic."""
    return [(u, v) for u in range(num_nodes) for v in range(u + 1, num_nodes)]


@dataclass(frozen=True)
class GraphInstance:
    """One labeled undirected graph.

    Nodes are indexed 0..num_nodes-1; edges are stored as a frozenset of
    (u, v) pairs with u < v. The label is the ground-truth class in {0, 1}.
    """

    id: int
    num_nodes: int
    edges: frozenset[Edge]
    label: int

    def __init__(self, id: int, num_nodes: int, edges: Iterable[Edge], label: int):
        if id < 0:
            raise ValueError(f"instance id must be non-negative, got {id}")
        if num_nodes < 0:
            raise ValueError(f"num_nodes must be non-negative, got {num_nodes}")
        if label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {label!r}")
        normalized = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop ({u},{v}) is not allowed")
            if not (0 <= u < num_nodes and 0 <= v < num_nodes):
                raise ValueError(
                    f"edge ({u},{v}) out of range for num_nodes={num_nodes}"
                )
            normalized.add(ordered_pair(u, v))
        object.__setattr__(self, "id", id)
        object.__setattr__(self, "num_nodes", num_nodes)
        object.__setattr__(self, "edges", frozenset(normalized))
        object.__setattr__(self, "label", label)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return ordered_pair(u, v) in self.edges

    def adjacency(self) -> list[set[int]]:
        """Neighbor sets, index-aligned with node ids."""
        adj: list[set[int]] = [set() for _ in range(self.num_nodes)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def to_json_obj(self) -> dict:
        """Canonical JSON form: edges as sorted [u, v] pairs with u < v."""
        return {
            "id": self.id,
            "num_nodes": self.num_nodes,
            "label": self.label,
            "edges": [[u, v] for u, v in self.sorted_edges()],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "GraphInstance":
        missing = {"id", "num_nodes", "label", "edges"} - set(obj)
        if missing:
            raise ValueError(f"instance object missing fields: {sorted(missing)}")
        return cls(
            id=obj["id"],
            num_nodes=obj["num_nodes"],
            edges=[tuple(e) for e in obj["edges"]],
            label=obj["label"],
        )


def ged(a: GraphInstance, b: GraphInstance) -> int:
    """Graph edit distance under identity node alignment.

    Node-count difference plus the symmetric difference of the two edge
    sets, matching node i of ``a`` with node i of ``b``.
    """
    return abs(a.num_nodes - b.num_nodes) + len(a.edges ^ b.edges)


def has_cycle(g: GraphInstance) -> bool:
    """True iff the graph contains at least one cycle.

    Iterative DFS over every component; a visited neighbor that is not the
    DFS parent closes a cycle.
    """
    adj = g.adjacency()
    visited = [False] * g.num_nodes
    for start in range(g.num_nodes):
        if visited[start]:
            continue
        stack: list[tuple[int, int]] = [(start, -1)]
        visited[start] = True
        while stack:
            node, parent = stack.pop()
            for nbr in adj[node]:
                if not visited[nbr]:
                    visited[nbr] = True
                    stack.append((nbr, node))
                elif nbr != parent:
                    return True
    return False


def flip_edge(g: GraphInstance, u: int, v: int) -> GraphInstance:
    """New instance with edge {u, v} toggled; the input is left unmodified."""
    if u == v:
        raise ValueError(f"cannot flip self-loop ({u},{v})")
    if min(u, v) < 0 or max(u, v) >= g.num_nodes:
        raise ValueError(f"edge ({u},{v}) out of range for num_nodes={g.num_nodes}")
    slot = ordered_pair(u, v)
    if slot in g.edges:
        edges = g.edges - {slot}
    else:
        edges = g.edges | {slot}
    return dataclasses.replace(g, edges=edges)


def feature_count(g: GraphInstance) -> int:
    """Instance size used by the sparsity metric: node count plus edge count."""
    return g.num_nodes + len(g.edges)


def connected_components(g: GraphInstance) -> int:
    """Number of connected components (isolated nodes count)."""
    adj = g.adjacency()
    visited = [False] * g.num_nodes
    count = 0
    for start in range(g.num_nodes):
        if visited[start]:
            continue
        count += 1
        stack = [start]
        visited[start] = True
        while stack:
            node = stack.pop()
            for nbr in adj[node]:
                if not visited[nbr]:
                    visited[nbr] = True
                    stack.append(nbr)
    return count


def triangle_count(g: GraphInstance) -> int:
    """Exact triangle count via common-neighbor enumeration per edge."""
    adj = g.adjacency()
    total = 0
    for u, v in g.edges:
        total += len(adj[u] & adj[v])
    return total // 3
