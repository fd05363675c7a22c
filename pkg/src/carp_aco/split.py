"""Giant tours, trips and the optimal Split procedure."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .graph import DUMMY, DistanceTables, Network


@dataclass(frozen=True)
class Trip:
    arcs: tuple[int, ...]
    load: int
    cost: int


@dataclass(frozen=True)
class Solution:
    trips: tuple[Trip, ...]
    total_cost: int

    def tour(self) -> np.ndarray:
        return concatenate(self)

    @property
    def load(self) -> int:
        return sum(t.load for t in self.trips)


def as_tour(arcs: Sequence[int]) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(arcs, dtype=np.int64).reshape(-1))


def check_tour(tour: Sequence[int], net: Network) -> None:
    """Raise ValueError unless ``tour`` services each required edge once."""
    tour = as_tour(tour)
    if (tour <= DUMMY).any() or (tour >= net.arc_count).any():
        raise ValueError("tour contains the depot loop or unknown arc ids")
    edges = net.edge_of[tour]
    if len(np.unique(edges)) != len(edges):
        raise ValueError("an edge appears twice in the tour")
    if set(edges.tolist()) != set(net.required_edges.tolist()):
        raise ValueError("tour does not cover exactly the required edges")


def evaluate_trip(tasks: Sequence[int], net: Network, dist: DistanceTables) -> Trip:
    if len(tasks) == 0:
        raise ValueError("a trip needs at least one task")
    w = dist.arc_dist
    tasks = [int(a) for a in tasks]
    cost = int(w[DUMMY, tasks[0]]) + int(w[tasks[-1], DUMMY])
    for a, b in zip(tasks, tasks[1:]):
        cost += int(w[a, b])
    cost += int(net.cost[tasks].sum())
    load = int(net.demand[tasks].sum())
    return Trip(tuple(tasks), load, cost)


def tour_cost(tour: Sequence[int], net: Network, dist: DistanceTables) -> int:
    """Optimal Split cost of ``tour`` without building the trips."""
    tour = as_tour(tour)
    _check_demands(tour, net)
    return int(_kernels.split_cost(tour, dist.arc_dist, net.cost, net.demand, net.capacity))


def _check_demands(tour: np.ndarray, net: Network) -> None:
    if len(tour) and net.demand[tour].max() > net.capacity:
        raise ValueError("a task demand exceeds the vehicle capacity")


def split(tour: Sequence[int], net: Network, dist: DistanceTables) -> Solution:
    """Cheapest cut of the tour into capacity-feasible trips, keeping order and orientation.

    Among equal-cost cuts the one with fewer trips wins, then the one whose
    break points are lexicographically earliest.
    """
    tour = as_tour(tour)
    n = len(tour)
    if n == 0:
        return Solution((), 0)
    _check_demands(tour, net)
    B = np.empty(n + 1, dtype=np.int64)
    succ = np.empty(n + 1, dtype=np.int64)
    nt = np.empty(n + 1, dtype=np.int64)
    total = _kernels.split_forward(tour, dist.arc_dist, net.cost, net.demand, net.capacity, B, succ, nt)
    cuts = []
    i = 0
    while i < n:
        j = int(succ[i])
        cuts.append((i, j))
        i = j
    trips = tuple(evaluate_trip(tour[i:j], net, dist) for i, j in cuts)
    assert sum(t.cost for t in trips) == total
    return Solution(trips, int(total))


def concatenate(sol: Solution) -> np.ndarray:
    arcs = [a for trip in sol.trips for a in trip.arcs]
    return as_tour(arcs)


def solution_from_trips(task_lists: Sequence[Sequence[int]], net: Network, dist: DistanceTables) -> Solution:
    trips = tuple(evaluate_trip(t, net, dist) for t in task_lists if len(t))
    return Solution(trips, sum(t.cost for t in trips))
