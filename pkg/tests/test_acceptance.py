"""Acceptance criteria, one test per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the terminal summary prints
one PASS/FAIL line per criterion. Criteria that need the public benchmark
files read them from ``CARP_INSTANCE_DIR`` and fail when it is not set.
"""
import io
import time

import numpy as np
import pytest

from carp_aco import prepare
from carp_aco.bench import ExperimentConfig, read_trace, run_experiments, solution_file, summary, table_text
from carp_aco.colony import Ant, ColonyParams, deposit, erase, run, selection_probabilities, weight
from carp_aco.heuristics import random_giant_tour
from carp_aco.instance_io import check_solution, iter_instance_files, load_instance, lookup_lb, read_lb_table
from carp_aco.local_search import improve_with_cost
from carp_aco.split import split, tour_cost
from carp_aco.synthetic import random_instance

from conftest import DATA, instance_dir
from oracles import Arcs, best_segmentation, optimum

SEEDS = (1, 2, 3)
LBS = read_lb_table()


def find_instance(name: str):
    base = instance_dir()
    if base is None:
        pytest.fail(f"benchmark file {name} needed: set CARP_INSTANCE_DIR to the directory holding it")
    want = name.lower().replace("egl-", "")
    for p in iter_instance_files(base):
        if p.stem.lower().replace("egl-", "") == want:
            return p
    pytest.fail(f"{name} not found under {base}")


@pytest.fixture(scope="module", autouse=True)
def warm_up(triangle):
    # compile the kernels once so timings below measure the solver only
    _, net, dist = triangle
    run(net, dist, ColonyParams(seed=0, i_max=2, f=8, f_e=2), workers=1)


@pytest.mark.criterion(1, "triangle optimum reached within 5 iterations for 10 seeds")
def test_criterion_1_triangle(triangle):
    inst, net, dist = triangle
    assert optimum(inst) == 5
    worst = 0.0
    for seed in range(1, 11):
        t0 = time.perf_counter()
        # ants at iterations 1..5 after the initial population
        res = run(net, dist, ColonyParams(seed=seed, i_max=6))
        worst = max(worst, time.perf_counter() - t0)
        assert res.best_cost == 5, f"seed {seed} ended at {res.best_cost}"
        assert res.best_iteration <= 5
    assert worst < 1.0, f"slowest run took {worst:.2f}s"


@pytest.mark.criterion(2, "split equals exhaustive segmentation on 500 tours")
def test_criterion_2_split_optimality():
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    checked = 0
    while checked < 500:
        n = int(rng.integers(3, 9))
        m = int(rng.integers(n - 1, min(n * (n - 1) // 2, 12) + 1))
        inst = random_instance(n, m, seed=int(rng.integers(1 << 30)), max_cost=10, max_demand=4,
                               required_fraction=float(rng.choice([1.0, 0.8])))
        net, dist = prepare(inst)
        if net.task_count > 12:
            continue
        arcs = Arcs(inst)
        for _ in range(5):
            tour = random_giant_tour(net, rng)
            assert split(tour, net, dist).total_cost == best_segmentation(tuple(tour.tolist()), arcs)
            checked += 1
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0, f"{elapsed:.1f}s"


@pytest.mark.criterion(3, "gdb4/7/15/17/19 reach LB within 20 iterations")
def test_criterion_3_easy_gdb():
    targets = {"gdb4": 287, "gdb7": 325, "gdb15": 58, "gdb17": 91, "gdb19": 55}
    paths = {name: find_instance(name) for name in targets}
    t0 = time.perf_counter()
    for name, lb in targets.items():
        net, dist = prepare(load_instance(paths[name]))
        best = min(run(net, dist, ColonyParams(seed=s, i_max=21), lb=lb).best_cost for s in SEEDS)
        assert best == lb, f"{name}: BACO {best}, LB {lb}"
    elapsed = time.perf_counter() - t0
    assert elapsed < 120, f"{elapsed:.0f}s"


@pytest.mark.criterion(4, "gdb1 BACO equals 316 within 200 iterations")
def test_criterion_4_gdb1(gdb1):
    inst, net, dist = gdb1
    t0 = time.perf_counter()
    costs = []
    for seed in SEEDS:
        res = run(net, dist, ColonyParams(seed=seed), lb=316)
        assert check_solution(inst, solution_file(res.best, net, dist)) == []
        costs.append(res.best_cost)
    elapsed = time.perf_counter() - t0
    assert min(costs) == 316, f"costs {costs}"
    assert elapsed < 60, f"{elapsed:.1f}s"


@pytest.mark.criterion(5, "23-instance gdb sweep: Av.Dev <= 1.0% and >= 14 hits")
def test_criterion_5_gdb_sweep():
    paths = [find_instance(f"gdb{i}") for i in range(1, 24)]
    rows, failures = run_experiments(ExperimentConfig(instances=paths, seeds=SEEDS))
    assert not failures, failures[:3]
    assert len(rows) == 23
    av, hits = summary(rows)
    print(table_text(rows))
    assert av is not None and av <= 1.0, f"Av.Dev {av:.2f}%"
    assert hits >= 14, f"{hits} hits"


@pytest.mark.criterion(6, "pheromone update, weights and selection probabilities")
def test_criterion_6_pheromone(gdb1):
    _, net, dist = gdb1
    rng = np.random.default_rng(6)
    md = dist.max_arc_dist
    for f in (2, 10, 60):
        assert weight(1, f, md) == 1.0
        assert weight(f, f, md) == pytest.approx(md, rel=1e-12)
    # evaporate everything, then add every ant's share along its tour
    f, rho = 15, 0.9
    ants = [Ant(s, False, random_giant_tour(net, rng), int(rng.integers(300, 500))) for s in range(1, f + 1)]
    tau = rng.random((net.arc_count, net.arc_count)) + 0.5
    expect = rho * tau
    for a in ants:
        seq = [0] + a.tour.tolist() + [0]
        for i, j in zip(seq, seq[1:]):
            expect[i, j] += weight(a.slot, f, md) / a.cost
    deposit(tau, ants, md, rho)
    assert np.abs(tau - expect).max() <= 1e-12
    for k in (1, 3, 10):
        for _ in range(50):
            tau = rng.random((net.arc_count, net.arc_count)) * 10 ** rng.uniform(-3, 3)
            taboo = set(rng.choice(22, size=int(rng.integers(0, 22)), replace=False).tolist())
            cur = int(rng.choice(net.required_arcs))
            omega, p_omega, psi, p_psi = selection_probabilities(cur, taboo, tau, net, dist, ColonyParams(k=k))
            assert np.all(p_omega == 1.0 / len(omega))
            if 22 - len(taboo) >= k:
                assert len(omega) == k
            assert abs(p_omega.sum() - 1) <= 1e-12 and abs(p_psi.sum() - 1) <= 1e-12
    erase(tau, 1.0)
    assert (tau == 1.0).all()


@pytest.mark.criterion(7, "best cost non-increasing, local search monotone, solutions feasible")
def test_criterion_7_monotone_feasible(gdb1):
    cases = [gdb1[0]] + [random_instance(n, m, seed=s) for n, m, s in [(10, 18, 1), (15, 30, 2), (20, 35, 3)]]
    rng = np.random.default_rng(7)
    for inst in cases:
        net, dist = prepare(inst)
        for seed in (1, 2):
            res = run(net, dist, ColonyParams(seed=seed, i_max=40, n_s=5), workers=1)
            best = [r.best_cost for r in res.trace]
            assert all(a >= b for a, b in zip(best, best[1:])), inst.name
            assert check_solution(inst, solution_file(res.best, net, dist)) == []
            assert res.best.total_cost == res.best_cost == tour_cost(res.best_tour, net, dist)
        for _ in range(100):
            tour = random_giant_tour(net, rng)
            new, cost = improve_with_cost(tour, net, dist)
            assert cost <= tour_cost(tour, net, dist)
            assert check_solution(inst, solution_file(split(new, net, dist), net, dist)) == []


@pytest.mark.criterion(8, "identical seeds give bit-identical tables and traces, serial and parallel")
def test_criterion_8_determinism(tmp_path):
    outputs = []
    for label, workers in (("a", 1), ("b", 1), ("c", 2)):
        out = tmp_path / label
        cfg = ExperimentConfig(instances=[DATA / "gdb1.dat", DATA / "triangle.dat"], seeds=SEEDS,
                               params=ColonyParams(i_max=25), out_dir=out, trace=True,
                               workers=workers, timing=False)
        rows, failures = run_experiments(cfg)
        assert not failures
        files = {p.name: p.read_bytes() for p in sorted(out.iterdir())}
        files["table.csv"] = table_text(rows, "csv").encode()
        files["table.txt"] = table_text(rows, "text").encode()
        outputs.append(files)
    assert len(outputs[0]) == 2 * 3 * 2 + 2
    assert outputs[0] == outputs[1], "two serial executions differ"
    assert outputs[0] == outputs[2], "serial and threaded executions differ"
    trace = read_trace(io.StringIO(outputs[0]["gdb1_s1_trace.csv"].decode()))
    # gdb1 may stop early at its bound; every recorded iteration holds the whole population
    assert len(trace) % 60 == 0 and sum(r["iteration"] == 0 for r in trace) == 60


@pytest.mark.criterion(9, "val1a reaches 173 and one egl instance runs 10 iterations feasibly")
def test_criterion_9_val_egl_smoke():
    path = find_instance("val1a")
    inst = load_instance(path)
    net, dist = prepare(inst)
    res = run(net, dist, ColonyParams(seed=1), lb=173)
    assert check_solution(inst, solution_file(res.best, net, dist)) == []
    assert res.best_cost == 173, f"val1a ended at {res.best_cost}"
    epath = find_instance("e1-a")
    einst = load_instance(epath)
    enet, edist = prepare(einst)
    eres = run(enet, edist, ColonyParams(seed=1, i_max=10), lb=lookup_lb(LBS, einst.name or epath.stem))
    assert len(eres.trace) >= 1
    assert check_solution(einst, solution_file(eres.best, enet, edist)) == []
