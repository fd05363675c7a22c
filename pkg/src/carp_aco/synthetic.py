"""Random connected CARP instances for tests and timing runs."""
from __future__ import annotations

import numpy as np

from .instance_io import EdgeRecord, InstanceFile


def random_instance(
    n_nodes: int,
    n_edges: int,
    seed: int = 0,
    max_cost: int = 20,
    max_demand: int = 5,
    capacity: int | None = None,
    required_fraction: float = 1.0,
    name: str | None = None,
) -> InstanceFile:
    """Spanning tree plus random extra edges; ids are 1-based, depot is node 1."""
    if n_edges < n_nodes - 1:
        raise ValueError("too few edges for a connected graph")
    if n_edges > n_nodes * (n_nodes - 1) // 2:
        raise ValueError("too many edges for a simple graph")
    rng = np.random.default_rng(seed)
    pairs = set()
    order = rng.permutation(n_nodes) + 1
    for idx in range(1, n_nodes):
        u, v = int(order[idx]), int(order[rng.integers(0, idx)])
        pairs.add((min(u, v), max(u, v)))
    while len(pairs) < n_edges:
        u, v = (int(x) for x in rng.choice(n_nodes, 2, replace=False) + 1)
        pairs.add((min(u, v), max(u, v)))
    edges = []
    for u, v in sorted(pairs):
        req = bool(rng.random() < required_fraction)
        edges.append(EdgeRecord(u, v, int(rng.integers(1, max_cost + 1)),
                                int(rng.integers(1, max_demand + 1)) if req else 0, req))
    if not any(e.required for e in edges):
        e = edges[0]
        edges[0] = EdgeRecord(e.u, e.v, e.cost, 1, True)
    if capacity is None:
        total = sum(e.demand for e in edges)
        capacity = max(max_demand, total // 5)
    return InstanceFile(name or f"rand{n_nodes}_{n_edges}_{seed}", n_nodes, 1, capacity, edges)
