"""Constructive heuristics used to seed the colony."""
from __future__ import annotations

from typing import Literal

import numpy as np

from .graph import DUMMY, DistanceTables, Network, opposite
from .split import Solution, as_tour, evaluate_trip, solution_from_trips, split

Criterion = Literal["min-distance", "max-productivity"]


def path_scanning(net: Network, dist: DistanceTables, criterion: Criterion = "min-distance",
                  rng: np.random.Generator | None = None) -> Solution:
    """Build trips one at a time, extending each with the most promising task.

    Ties go to the lowest arc id, so the result is deterministic and ``rng``
    is accepted only for a uniform heuristic signature.
    """
    if criterion not in ("min-distance", "max-productivity"):
        raise ValueError(f"unknown criterion {criterion!r}")
    w = dist.arc_dist
    todo = set(net.required_edges.tolist())
    trips = []
    while todo:
        cur, residual, trip = DUMMY, net.capacity, []
        while True:
            best, best_key = None, None
            for e in sorted(todo):
                for a in (2 * e + 1, 2 * e + 2):
                    if net.demand[a] > residual:
                        continue
                    d = int(w[cur, a])
                    if criterion == "min-distance":
                        key = (d, a)
                    else:
                        ratio = net.demand[a] / d if d > 0 else float("inf")
                        key = (-ratio, d, a)
                    if best_key is None or key < best_key:
                        best, best_key = a, key
            if best is None:
                break
            trip.append(best)
            residual -= int(net.demand[best])
            todo.discard(int(net.edge_of[best]))
            cur = best
        if not trip:  # unreachable after validation: every demand fits in an empty vehicle
            raise RuntimeError("path scanning stalled")
        trips.append(trip)
    return solution_from_trips(trips, net, dist)


def _deadhead_edges(trip, net: Network, dist: DistanceTables):
    """Yield (position, edge, u, v): edges walked between serviced tasks.

    ``position`` is the index in the task list at which an edge serviced on
    the way would be inserted.
    """
    stops = [net.depot]
    for a in trip:
        stops.append(int(net.tail[a]))
        stops.append(int(net.head[a]))
    stops.append(net.depot)
    for pos in range(len(trip) + 1):
        src, dst = stops[2 * pos], stops[2 * pos + 1]
        path = dist.node_path(src, dst)
        for u, v in zip(path, path[1:]):
            yield pos, u, v


def augment_merge(net: Network, dist: DistanceTables) -> Solution:
    w = dist.arc_dist
    pair_edge = {}
    for e in range(net.edge_count):
        u, v = net.arc_nodes(2 * e + 1)
        pair_edge[(u, v)] = e
        pair_edge[(v, u)] = e

    # one trip per required edge
    trips = {int(e): [2 * int(e) + 1] for e in net.required_edges}
    loads = {e: int(net.demand[t[0]]) for e, t in trips.items()}
    costs = {e: evaluate_trip(t, net, dist).cost for e, t in trips.items()}

    # augment: longer trips absorb single-task trips lying on their deadheads
    owner = {e: e for e in trips}  # edge -> trip key
    for big in sorted(trips, key=lambda e: (-costs[e], e)):
        if big not in trips:
            continue
        new_trip = []
        inserted = set()
        walk = list(_deadhead_edges(trips[big], net, dist))
        original = trips[big]
        pos_done = 0
        for pos, u, v in walk:
            while pos_done < pos:
                new_trip.append(original[pos_done])
                pos_done += 1
            e = pair_edge[(u, v)]
            if (
                e in trips
                and e != big
                and e not in inserted
                and owner[e] == e
                and len(trips[e]) == 1
                and costs[e] < costs[big]
                and loads[big] + loads[e] <= net.capacity
            ):
                arc = 2 * e + 1 if net.tail[2 * e + 1] == u else 2 * e + 2
                new_trip.append(arc)
                inserted.add(e)
                loads[big] += loads[e]
        new_trip.extend(original[pos_done:])
        for e in inserted:
            del trips[e]
            owner[e] = big
        trips[big] = new_trip
        costs[big] = evaluate_trip(new_trip, net, dist).cost

    # merge: apply the best positive-saving concatenation until none is left
    routes = [trips[k] for k in sorted(trips)]
    rload = [sum(int(net.demand[a]) for a in r) for r in routes]

    def rev(r):
        return [opposite(a) for a in reversed(r)]

    while True:
        best = None
        for i in range(len(routes)):
            for j in range(i + 1, len(routes)):
                if rload[i] + rload[j] > net.capacity:
                    continue
                a, b = routes[i], routes[j]
                for ra, rb in ((False, False), (False, True), (True, False), (True, True)):
                    last = opposite(a[0]) if ra else a[-1]
                    first = opposite(b[-1]) if rb else b[0]
                    gain = int(w[last, DUMMY]) + int(w[DUMMY, first]) - int(w[last, first])
                    if gain > 0 and (best is None or gain > best[0]):
                        best = (gain, i, j, ra, rb)
        if best is None:
            break
        _, i, j, ra, rb = best
        merged = (rev(routes[i]) if ra else routes[i]) + (rev(routes[j]) if rb else routes[j])
        routes[i] = merged
        rload[i] += rload[j]
        del routes[j], rload[j]
    return solution_from_trips(routes, net, dist)


def nearest_neighbor_tour(net: Network, dist: DistanceTables) -> np.ndarray:
    """Capacity-relaxed tour: always go to the closest unserviced task (lowest arc id on ties)."""
    w = dist.arc_dist
    todo = set(net.required_edges.tolist())
    cur, tour = DUMMY, []
    while todo:
        arcs = np.array(sorted(a for e in todo for a in (2 * e + 1, 2 * e + 2)))
        a = int(arcs[np.argmin(w[cur, arcs])])
        tour.append(a)
        todo.discard(int(net.edge_of[a]))
        cur = a
    return as_tour(tour)


def ulusoy_heuristic(net: Network, dist: DistanceTables, rng: np.random.Generator | None = None) -> Solution:
    return split(nearest_neighbor_tour(net, dist), net, dist)


def random_giant_tour(net: Network, rng: np.random.Generator) -> np.ndarray:
    edges = rng.permutation(net.required_edges)
    flips = rng.integers(0, 2, size=len(edges))
    return as_tour(2 * edges + 1 + flips)
