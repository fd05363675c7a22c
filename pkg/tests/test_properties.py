import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from carp_aco import prepare
from carp_aco.colony import Ant, ColonyParams, deposit, erase, selection_probabilities, weight
from carp_aco.graph import saving
from carp_aco.heuristics import random_giant_tour
from carp_aco.instance_io import parse_canonical, write_canonical
from carp_aco.local_search import improve_with_cost
from carp_aco.split import check_tour, split, tour_cost
from carp_aco.synthetic import random_instance

from oracles import Arcs, best_segmentation

FAST = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@st.composite
def instances(draw, max_nodes=7, max_extra=5):
    n = draw(st.integers(2, max_nodes))
    m = draw(st.integers(n - 1, min(n * (n - 1) // 2, n - 1 + max_extra)))
    seed = draw(st.integers(0, 10_000))
    frac = draw(st.sampled_from([1.0, 0.7]))
    inst = random_instance(n, m, seed=seed, max_cost=draw(st.integers(1, 9)),
                           max_demand=draw(st.integers(1, 4)), required_fraction=frac)
    return inst


@FAST
@given(instances(), st.integers(0, 2**32 - 1))
def test_split_matches_exhaustive(inst, seed):
    net, dist = prepare(inst)
    if net.task_count > 10:
        return
    tour = random_giant_tour(net, np.random.default_rng(seed))
    sol = split(tour, net, dist)
    assert sol.total_cost == best_segmentation([int(a) for a in tour], Arcs(inst))
    assert all(t.load <= net.capacity for t in sol.trips)
    assert [a for t in sol.trips for a in t.arcs] == tour.tolist()


@FAST
@given(instances(max_nodes=9, max_extra=8), st.integers(0, 2**32 - 1))
def test_local_search_never_worse(inst, seed):
    net, dist = prepare(inst)
    tour = random_giant_tour(net, np.random.default_rng(seed))
    before = tour_cost(tour, net, dist)
    new, cost = improve_with_cost(tour, net, dist)
    check_tour(new, net)
    assert cost == tour_cost(new, net, dist) <= before
    # a second pass finds nothing
    assert improve_with_cost(new, net, dist)[1] == cost


@FAST
@given(instances(), st.integers(0, 2**32 - 1), st.floats(0.0, 1.0))
def test_deposit_evaporates_then_adds(inst, seed, rho):
    net, dist = prepare(inst)
    rng = np.random.default_rng(seed)
    f = int(rng.integers(2, 8))
    ants = [Ant(s, False, random_giant_tour(net, rng), int(rng.integers(1, 100))) for s in range(1, f + 1)]
    tau = rng.random((net.arc_count, net.arc_count)) + 0.01
    before = tau.copy()
    deposit(tau, ants, dist.max_arc_dist, rho)
    added = tau - rho * before
    assert (added >= -1e-12).all()
    # nothing lands on pairs no ant used
    used = np.zeros_like(tau, dtype=bool)
    for a in ants:
        seq = [0] + a.tour.tolist() + [0]
        used[seq[:-1], seq[1:]] = True
    assert np.allclose(added[~used], 0.0, atol=1e-12)
    bound = sum(weight(a.slot, f, dist.max_arc_dist) / a.cost for a in ants)
    assert added.max() <= bound + 1e-9


@FAST
@given(instances(), st.floats(0.01, 100.0))
def test_erase_is_uniform(inst, tau0):
    net, _ = prepare(inst)
    tau = np.random.default_rng(0).random((net.arc_count, net.arc_count))
    erase(tau, tau0)
    assert np.unique(tau).tolist() == [tau0]


@FAST
@given(st.integers(2, 200), st.floats(0.0, 500.0))
def test_weights_rise_from_one_to_md(f, md):
    w = [weight(mu, f, md) for mu in range(1, f + 1)]
    assert w[0] == 1.0
    assert abs(w[-1] - max(md, 1.0)) <= 1e-9 * max(md, 1.0)
    assert all(a <= b + 1e-12 for a, b in zip(w, w[1:]))


@FAST
@given(instances(max_nodes=8, max_extra=8), st.integers(0, 2**32 - 1), st.integers(1, 8))
def test_probabilities_sum_to_one(inst, seed, k):
    net, dist = prepare(inst)
    rng = np.random.default_rng(seed)
    tau = rng.random((net.arc_count, net.arc_count)) * 10 ** rng.uniform(-6, 6)
    edges = net.required_edges
    taboo = set(rng.choice(edges, size=int(rng.integers(0, len(edges))), replace=False).tolist())
    cur = int(rng.choice(np.concatenate([[0], net.required_arcs])))
    _, p_omega, _, p_psi = selection_probabilities(cur, taboo, tau, net, dist, ColonyParams(k=k))
    assert abs(p_omega.sum() - 1) <= 1e-12 and abs(p_psi.sum() - 1) <= 1e-12
    assert np.allclose(p_omega, p_omega[0])


@FAST
@given(instances(max_nodes=10, max_extra=10))
def test_canonical_round_trip(inst):
    text = write_canonical(inst)
    back = parse_canonical(text)
    assert back == inst
    assert write_canonical(back) == text


@FAST
@given(instances(max_nodes=10, max_extra=10))
def test_savings_in_unit_interval(inst):
    net, dist = prepare(inst)
    if dist.max_arc_dist == 0:
        return
    idx = np.concatenate([[0], net.required_arcs])
    for i in idx:
        for j in idx:
            assert 0.0 <= saving(dist, int(i), int(j)) <= 1.0
