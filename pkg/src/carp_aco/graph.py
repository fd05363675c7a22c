"""Internal arc-indexed graph and distance tables.

Every undirected edge ``e`` becomes two opposite arcs, ``2e+1`` (u->v) and
``2e+2`` (v->u). Arc ``0`` is a zero-cost loop on the depot; it stands for
"being at the depot" and delimits trips.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .instance_io import InstanceError, InstanceFile, validate

DUMMY = 0


def forward_arc(edge: int) -> int:
    return 2 * edge + 1


def reverse_arc(edge: int) -> int:
    return 2 * edge + 2


def opposite(arc: int) -> int:
    if arc == DUMMY:
        return DUMMY
    return arc + 1 if arc % 2 == 1 else arc - 1


@dataclass(frozen=True, eq=False)
class Network:
    name: str
    node_count: int
    depot: int
    capacity: int
    tail: np.ndarray      # per arc, node id
    head: np.ndarray
    cost: np.ndarray      # per arc, traversal/service cost
    demand: np.ndarray
    edge_of: np.ndarray   # per arc, edge index (-1 for the dummy loop)
    required: np.ndarray  # per edge, bool
    required_arcs: np.ndarray   # sorted arc ids, both orientations of each required edge

    @property
    def arc_count(self) -> int:
        return len(self.tail)

    @property
    def edge_count(self) -> int:
        return len(self.required)

    @cached_property
    def required_edges(self) -> np.ndarray:
        return np.flatnonzero(self.required)

    @property
    def task_count(self) -> int:
        return int(self.required.sum())

    @cached_property
    def opposite_arc(self) -> np.ndarray:
        return np.array([opposite(a) for a in range(self.arc_count)], dtype=np.int64)

    @cached_property
    def max_trip_tasks(self) -> int:
        """Most tasks any single trip can hold given the capacity."""
        d = np.sort(self.demand[self.required_arcs[::2]])
        return max(1, int(np.searchsorted(np.cumsum(d), self.capacity, side="right")))

    def arc_nodes(self, arc: int) -> tuple[int, int]:
        return int(self.tail[arc]), int(self.head[arc])

    def arc_for(self, u: int, v: int) -> int:
        """Arc id servicing the edge between ``u`` and ``v`` in direction u->v."""
        for a in range(1, self.arc_count):
            if self.tail[a] == u and self.head[a] == v:
                return a
        raise KeyError(f"no edge ({u},{v})")


def build_network(inst: InstanceFile) -> Network:
    errors = validate(inst)
    if errors:
        raise InstanceError("; ".join(errors))
    m = len(inst.edges)
    tail = np.empty(2 * m + 1, dtype=np.int64)
    head = np.empty_like(tail)
    cost = np.zeros_like(tail)
    demand = np.zeros_like(tail)
    edge_of = np.full_like(tail, -1)
    tail[0] = head[0] = inst.depot
    required = np.zeros(m, dtype=bool)
    for e, rec in enumerate(inst.edges):
        f, r = forward_arc(e), reverse_arc(e)
        tail[f], head[f] = rec.u, rec.v
        tail[r], head[r] = rec.v, rec.u
        cost[f] = cost[r] = rec.cost
        demand[f] = demand[r] = rec.demand if rec.required else 0
        edge_of[f] = edge_of[r] = e
        required[e] = rec.required
    req_arcs = np.sort(
        np.concatenate([2 * np.flatnonzero(required) + 1, 2 * np.flatnonzero(required) + 2])
    ).astype(np.int64)
    return Network(
        name=inst.name,
        node_count=inst.node_count,
        depot=inst.depot,
        capacity=inst.capacity,
        tail=tail,
        head=head,
        cost=cost,
        demand=demand,
        edge_of=edge_of,
        required=required,
        required_arcs=req_arcs,
    )


@dataclass(frozen=True, eq=False)
class DistanceTables:
    """Shortest-path lengths. ``node_dist`` is indexed by 1-based node ids (row/col 0 unused)."""

    node_dist: np.ndarray
    arc_dist: np.ndarray
    max_arc_dist: int
    predecessors: np.ndarray

    def node_path(self, u: int, v: int) -> list[int]:
        """Nodes of a shortest path from ``u`` to ``v``, both ends included."""
        path = [v]
        while path[-1] != u:
            p = int(self.predecessors[u, path[-1]])
            if p < 0:
                raise ValueError(f"no path {u}->{v}")
            path.append(p)
        return path[::-1]


def shortest_paths(net: Network) -> DistanceTables:
    n = net.node_count
    fwd = np.arange(1, net.arc_count, 2)
    rows = np.concatenate([net.tail[fwd], net.head[fwd]])
    cols = np.concatenate([net.head[fwd], net.tail[fwd]])
    w = np.concatenate([net.cost[fwd], net.cost[fwd]]).astype(float)
    graph = csr_matrix((w, (rows, cols)), shape=(n + 1, n + 1))
    dist, pred = dijkstra(graph, directed=True, return_predecessors=True)
    sub = dist[1:, 1:]
    if not np.isfinite(sub[net.depot - 1]).all():
        bad = (np.flatnonzero(~np.isfinite(sub[net.depot - 1])) + 1).tolist()
        raise InstanceError(f"nodes {bad} unreachable from depot {net.depot}")
    node_dist = np.zeros((n + 1, n + 1), dtype=np.int64)
    node_dist[1:, 1:] = np.rint(sub).astype(np.int64)
    arc_dist = node_dist[np.ix_(net.head, net.tail)]
    idx = np.concatenate([[DUMMY], net.required_arcs])
    max_arc = int(arc_dist[np.ix_(idx, idx)].max())
    return DistanceTables(
        node_dist=node_dist,
        arc_dist=np.ascontiguousarray(arc_dist),
        max_arc_dist=max_arc,
        predecessors=pred,
    )


def saving(dist: DistanceTables, i: int, j: int) -> float:
    md = dist.max_arc_dist
    if md <= 0:
        raise ValueError("saving undefined: maximal arc distance is 0")
    return (md - float(dist.arc_dist[i, j])) / md
