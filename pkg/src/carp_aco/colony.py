"""Elitist ant colony over giant tours.

Ants live in rank slots ``1..f``; after every iteration the population is
sorted by decreasing cost, so slot ``f`` holds the best tour and the top
``f_e`` slots are elitist (they only accept strictly better tours).
"""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from . import _kernels
from .graph import DUMMY, DistanceTables, Network
from .heuristics import augment_merge, path_scanning, random_giant_tour, ulusoy_heuristic
from .split import Solution, as_tour, split, tour_cost


@dataclass(frozen=True)
class ColonyParams:
    f: int = 60
    f_e: int = 10
    rho: float = 0.90
    k: int = 10
    p_ls: float = 0.5
    p_p: float = 0.1
    i_max: int = 200
    n_s: int = 10
    alpha: float = 1.0
    beta: float = 1.0
    tau0: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.f_e <= self.f:
            raise ValueError(f"need 0 < f_e <= f, got f_e={self.f_e}, f={self.f}")
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must lie in [0, 1], got {self.rho}")
        if self.k < 1:
            raise ValueError("k must be at least 1")
        for name in ("p_ls", "p_p"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must be a probability")
        if self.tau0 <= 0:
            raise ValueError("tau0 must be positive")
        if self.i_max < 0 or self.n_s < 1:
            raise ValueError("i_max must be >= 0 and n_s >= 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    def with_overrides(self, **kw) -> "ColonyParams":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


@dataclass
class Ant:
    slot: int
    elitist: bool
    tour: np.ndarray
    cost: int


def ant_rng(seed: int, iteration: int, slot: int) -> np.random.Generator:
    return np.random.default_rng([seed, iteration, slot])


def sort_population(ants: list[Ant], f_e: int) -> list[Ant]:
    """Decreasing cost (stable), renumber slots, flag the f_e best as elitist."""
    ordered = sorted(ants, key=lambda a: -a.cost)
    f = len(ordered)
    for mu, ant in enumerate(ordered, start=1):
        ant.slot = mu
        ant.elitist = mu > f - f_e
    return ordered


def init_population(net: Network, dist: DistanceTables, params: ColonyParams) -> list[Ant]:
    if params.f < 4:
        raise ValueError("the population needs at least 4 ants (3 heuristics + 1 random)")
    ps = min(
        (path_scanning(net, dist, c) for c in ("min-distance", "max-productivity")),
        key=lambda s: s.total_cost,
    )
    tours = [s.tour() for s in (ps, augment_merge(net, dist), ulusoy_heuristic(net, dist))]
    for slot in range(3, params.f):
        tours.append(random_giant_tour(net, ant_rng(params.seed, 0, slot)))
    ants = [Ant(i + 1, False, t, tour_cost(t, net, dist)) for i, t in enumerate(tours)]
    return sort_population(ants, params.f_e)


# -------------------------------------------------------------- pheromone

def init_pheromone(net: Network, tau0: float = 1.0) -> np.ndarray:
    return np.full((net.arc_count, net.arc_count), float(tau0))


def erase(pheromone: np.ndarray, tau0: float) -> np.ndarray:
    pheromone[...] = tau0
    return pheromone


def weight(mu: int, f: int, max_arc_dist: float) -> float:
    """Rank weight: 1 for the worst slot, max_arc_dist for the best (never below 1)."""
    if f < 2:
        raise ValueError("rank weights need f >= 2")
    md = float(max_arc_dist)
    return max(1.0, 1.0 + (mu - 1) * (md - 1.0) / (f - 1))


def deposit(pheromone: np.ndarray, ants: Sequence[Ant], max_arc_dist: float, rho: float) -> np.ndarray:
    """Evaporate everything, then add F/L along each ant's tour (depot loop at both ends)."""
    pheromone *= rho
    f = len(ants)
    for ant in ants:
        amount = weight(ant.slot, f, max_arc_dist) / ant.cost
        seq = np.concatenate(([DUMMY], ant.tour, [DUMMY]))
        np.add.at(pheromone, (seq[:-1], seq[1:]), amount)
    return pheromone


def stagnation(best_history: Sequence[int]) -> int:
    """Iterations since the last strict improvement of the best cost."""
    count = 0
    best = None
    for c in best_history:
        if best is None or c < best:
            best, count = c, 0
        else:
            count += 1
    return count


def erase_check(best_history: Sequence[int], n_s: int) -> bool:
    return stagnation(best_history) >= n_s


# --------------------------------------------------------------- ants

def _remaining_arcs(net: Network, taboo: Iterable[int]) -> np.ndarray:
    taboo = set(int(e) for e in taboo)
    arcs = [int(a) for a in net.required_arcs if int(net.edge_of[a]) not in taboo]
    return as_tour(arcs)


def candidate_sets(current: int, taboo, pheromone, net: Network, dist: DistanceTables, k: int):
    remaining = _remaining_arcs(net, taboo)
    if len(remaining) == 0:
        raise ValueError("no non-taboo task left")
    return _kernels.candidate_sets(current, remaining, len(remaining), dist.arc_dist, pheromone, k)


def selection_probabilities(current, taboo, pheromone, net, dist, params: ColonyParams):
    """Return (omega, p_omega, psi, p_psi): the two candidate lists and their laws."""
    omega, psi = candidate_sets(current, taboo, pheromone, net, dist, params.k)
    p_omega = np.full(len(omega), 1.0 / len(omega))
    w = _kernels.psi_weights(current, psi, dist.arc_dist, pheromone, float(dist.max_arc_dist),
                             params.alpha, params.beta)
    p_psi = w / w.sum() if w.sum() > 0 else np.full(len(psi), 1.0 / len(psi))
    return omega, p_omega, psi, p_psi


def select_next_arc(current, taboo, pheromone, net, dist, params: ColonyParams, rng) -> int:
    remaining = _remaining_arcs(net, taboo)
    u1, u2 = rng.random(2)
    return int(_kernels.select_step(
        current, remaining, len(remaining), dist.arc_dist, pheromone,
        float(dist.max_arc_dist), params.k, params.p_p, params.alpha, params.beta, u1, u2,
    ))


def construct_tour(net, dist, pheromone, params: ColonyParams, rng) -> tuple[np.ndarray, int, bool]:
    """Build one tour from the depot; returns (tour, split cost, local search applied)."""
    if dist.max_arc_dist <= 0:
        raise ValueError("savings undefined: maximal arc distance is 0")
    apply_ls = rng.random() < params.p_ls
    uniforms = rng.random(net.task_count * 2)
    tour = _kernels.construct(
        net.required_arcs, net.opposite_arc, dist.arc_dist, pheromone,
        float(dist.max_arc_dist), params.k, params.p_p, params.alpha, params.beta, uniforms,
    )
    if apply_ls:
        tour, cost, _ = _kernels.improve(tour, dist.arc_dist, net.cost, net.demand,
                                         net.opposite_arc, net.capacity, net.max_trip_tasks)
    else:
        cost = _kernels.split_cost(tour, dist.arc_dist, net.cost, net.demand, net.capacity)
    return tour, int(cost), bool(apply_ls)


def store_result(ant: Ant, tour: np.ndarray, cost: int) -> bool:
    """Replace the ant's tour: always if non-elitist, only if strictly better if elitist."""
    if ant.elitist and cost >= ant.cost:
        return False
    ant.tour, ant.cost = tour, cost
    return True


# ----------------------------------------------------------------- loop

@dataclass
class IterationRecord:
    iteration: int
    costs: tuple[int, ...]   # slot 1..f after sorting
    best_cost: int
    elapsed: float
    erased: bool
    ls_count: int


@dataclass
class RunResult:
    best: Solution
    best_tour: np.ndarray
    best_cost: int
    best_iteration: int
    iterations: int
    time_to_best: float
    total_time: float
    trace: list[IterationRecord] = field(default_factory=list)
    reached_lb: bool = False


def run(
    net: Network,
    dist: DistanceTables,
    params: ColonyParams = ColonyParams(),
    lb: Optional[int] = None,
    workers: int = 1,
    progress=None,
) -> RunResult:
    """Run the colony until the best cost equals ``lb`` or the iteration cap is hit.

    ``workers > 1`` builds the ants of one iteration on a thread pool; the
    result is identical to the serial run because every ant draws from its
    own (seed, iteration, slot) stream.
    """
    t0 = time.perf_counter()
    ants = init_population(net, dist, params)
    tau = init_pheromone(net, params.tau0)
    md = float(dist.max_arc_dist)

    best_cost = ants[-1].cost
    best_tour = ants[-1].tour.copy()
    best_iter, time_best = 0, time.perf_counter() - t0
    history = [best_cost]  # since last erase
    trace = [IterationRecord(0, tuple(a.cost for a in ants), best_cost, time_best, False, 0)]

    def work(job):
        it, slot = job
        return construct_tour(net, dist, tau, params, ant_rng(params.seed, it, slot))

    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    it = 0
    try:
        # iteration counter starts at 1 and the loop stops when it reaches i_max,
        # so i_max - 1 ant iterations follow the initial population (iteration 0)
        while not (lb is not None and best_cost <= lb) and it + 1 < params.i_max:
            it += 1
            deposit(tau, ants, md, params.rho)
            jobs = [(it, ant.slot) for ant in ants]
            results = list(pool.map(work, jobs)) if pool else [work(j) for j in jobs]
            ls_count = 0
            for ant, (tour, cost, used_ls) in zip(ants, results):
                store_result(ant, tour, cost)
                ls_count += used_ls
            ants = sort_population(ants, params.f_e)
            now = time.perf_counter() - t0
            if ants[-1].cost < best_cost:
                best_cost, best_tour = ants[-1].cost, ants[-1].tour.copy()
                best_iter, time_best = it, now
            history.append(ants[-1].cost)
            erased = erase_check(history, params.n_s)
            if erased:
                erase(tau, params.tau0)
                history = [ants[-1].cost]
            trace.append(IterationRecord(it, tuple(a.cost for a in ants), best_cost, now, erased, ls_count))
            if progress is not None:
                progress(trace[-1])
    finally:
        if pool:
            pool.shutdown()

    best = split(best_tour, net, dist)
    assert best.total_cost == best_cost
    return RunResult(
        best=best,
        best_tour=best_tour,
        best_cost=best_cost,
        best_iteration=best_iter,
        iterations=it,
        time_to_best=time_best,
        total_time=time.perf_counter() - t0,
        trace=trace,
        reached_lb=lb is not None and best_cost <= lb,
    )
