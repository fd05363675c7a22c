import itertools
from collections import Counter

import numpy as np
import pytest

from carp_aco import prepare
from carp_aco.bench import solution_file
from carp_aco.heuristics import (
    augment_merge,
    nearest_neighbor_tour,
    path_scanning,
    random_giant_tour,
    ulusoy_heuristic,
)
from carp_aco.instance_io import EdgeRecord, InstanceFile, check_solution
from carp_aco.split import check_tour, split
from carp_aco.synthetic import random_instance

from oracles import optimum

CRITERIA = ("min-distance", "max-productivity")


def feasible(inst, net, dist, sol):
    assert check_solution(inst, solution_file(sol, net, dist)) == []
    assert all(t.load <= inst.capacity for t in sol.trips)
    assert sol.total_cost == sum(t.cost for t in sol.trips)


def test_triangle_optimum_by_exhaustion(triangle):
    assert optimum(triangle[0]) == 5


def test_path_scanning_triangle(triangle):
    inst, net, dist = triangle
    sol = path_scanning(net, dist, "min-distance")
    feasible(inst, net, dist, sol)
    assert len(sol.trips) == 2 and sol.total_cost == 5


@pytest.mark.parametrize("criterion", CRITERIA)
def test_path_scanning_single_edge(criterion):
    inst = InstanceFile("one", 3, 1, 5, [EdgeRecord(1, 2, 4, 2, False), EdgeRecord(2, 3, 3, 1, True)])
    net, dist = prepare(inst)
    sol = path_scanning(net, dist, criterion)
    assert len(sol.trips) == 1
    assert sol.total_cost == 4 + 3 + 3 + 4


def test_path_scanning_opens_new_trip_when_full():
    # Q=2 and demands 2: every trip can hold one task
    edges = [EdgeRecord(1, 2, 1, 2, True), EdgeRecord(2, 3, 1, 2, True), EdgeRecord(3, 1, 1, 2, True)]
    net, dist = prepare(InstanceFile("full", 3, 1, 2, edges))
    sol = path_scanning(net, dist)
    assert [len(t.arcs) for t in sol.trips] == [1, 1, 1]


def test_path_scanning_rejects_unknown_criterion(triangle):
    with pytest.raises(ValueError):
        path_scanning(triangle[1], triangle[2], "fastest")


def test_augment_merge_triangle(triangle):
    inst, net, dist = triangle
    sol = augment_merge(net, dist)
    feasible(inst, net, dist, sol)
    assert 5 <= sol.total_cost < 6


def test_augment_merge_single_edge():
    inst = InstanceFile("one", 2, 1, 5, [EdgeRecord(1, 2, 4, 2, True)])
    net, dist = prepare(inst)
    sol = augment_merge(net, dist)
    assert len(sol.trips) == 1 and sol.total_cost == 8


def test_augment_merge_large_capacity_triangle(triangle):
    inst = InstanceFile("big", 3, 1, 100, triangle[0].edges)
    net, dist = prepare(inst)
    sol = augment_merge(net, dist)
    feasible(inst, net, dist, sol)
    assert sol.total_cost >= optimum(inst)


def test_ulusoy_triangle(triangle):
    inst, net, dist = triangle
    sol = ulusoy_heuristic(net, dist)
    feasible(inst, net, dist, sol)
    assert sol.total_cost == 5
    assert split(nearest_neighbor_tour(net, dist), net, dist).total_cost == sol.total_cost


def test_ulusoy_single_edge():
    inst = InstanceFile("one", 2, 1, 5, [EdgeRecord(1, 2, 4, 2, True)])
    net, dist = prepare(inst)
    assert ulusoy_heuristic(net, dist).total_cost == 8


def test_every_order_of_the_triangle_splits_to_5(triangle):
    inst, net, dist = triangle
    for order in itertools.permutations([0, 1, 2]):
        best = min(
            split([2 * e + f for e, f in zip(order, flips)], net, dist).total_cost
            for flips in itertools.product((1, 2), repeat=3)
        )
        assert best == 5


def test_gdb1_heuristics_band(gdb1):
    inst, net, dist = gdb1
    for sol in [path_scanning(net, dist, c) for c in CRITERIA] + [augment_merge(net, dist), ulusoy_heuristic(net, dist)]:
        feasible(inst, net, dist, sol)
        assert sol.total_cost >= 316


@pytest.mark.parametrize("seed", range(8))
def test_heuristics_feasible_on_random_instances(seed):
    inst = random_instance(8 + seed, 12 + 2 * seed, seed=seed, required_fraction=0.8)
    net, dist = prepare(inst)
    for sol in (path_scanning(net, dist), path_scanning(net, dist, "max-productivity"),
                augment_merge(net, dist), ulusoy_heuristic(net, dist)):
        feasible(inst, net, dist, sol)


def test_random_tour_valid_and_seeded(gdb1):
    _, net, _ = gdb1
    a = random_giant_tour(net, np.random.default_rng(42))
    b = random_giant_tour(net, np.random.default_rng(42))
    check_tour(a, net)
    assert a.tolist() == b.tolist()


def test_random_tour_uniform_permutations(triangle):
    _, net, _ = triangle
    rng = np.random.default_rng(2024)
    draws = 10_000
    perms = Counter()
    orient = Counter()
    for _ in range(draws):
        tour = random_giant_tour(net, rng)
        perms[tuple(net.edge_of[tour].tolist())] += 1
        orient[int(tour[0]) % 2] += 1
    assert len(perms) == 6
    for count in perms.values():
        assert abs(count / draws - 1 / 6) <= 0.02
    assert abs(orient[1] / draws - 0.5) <= 0.02


def test_heuristics_deterministic(gdb1):
    _, net, dist = gdb1
    assert path_scanning(net, dist) == path_scanning(net, dist)
    assert augment_merge(net, dist) == augment_merge(net, dist)
    assert ulusoy_heuristic(net, dist, np.random.default_rng(1)) == ulusoy_heuristic(net, dist, np.random.default_rng(2))
