import random

import pytest

import oracles
from conftest import path_graph
from agentplan.itinerary import expand_walk, optimal_closed_walk, tour_order, walk_time, walk_violations
from agentplan.routing import path_to, shortest_paths
from agentplan.topology import NodeSpec, build, node_sort_key

A2_NODES = ["H", "H0", "H3", "H5", "H6", "H4", "H8", "H4", "H6", "H9", "H6", "H5", "H3", "H0", "H"]
A2_TIMES = [0, 30, 120, 150, 220, 280, 350, 420, 480, 500, 520, 590, 620, 710, 740]


def test_a2_walk_with_h9_detour(fig):
    w = optimal_closed_walk(fig, {"H8", "H9"})
    assert w.nodes == A2_NODES
    assert [time for _, time in w.hops] == A2_TIMES
    assert walk_time(w) == 740
    assert w.visit_order() == ["H8", "H9"]


def test_single_target_is_out_and_back(fig):
    spt = shortest_paths(fig, "H")
    for v in fig.managed:
        w = optimal_closed_walk(fig, {v})
        out = path_to(spt, v)
        assert w.nodes == out + out[-2::-1]
        assert walk_time(w) == 2 * spt.dist[v]


def test_a1_walk(fig):
    assert walk_time(optimal_closed_walk(fig, {"H1", "H7"})) == 220


def test_a0_walk(fig):
    w = optimal_closed_walk(fig, {"H0", "H3", "H5", "H6", "H4", "H2"})
    assert walk_time(w) == 740
    assert [time for _, time in w.hops[:7]] == [0, 30, 120, 150, 220, 280, 370]


def test_rejects_bad_targets(fig):
    with pytest.raises(ValueError):
        optimal_closed_walk(fig, set())
    with pytest.raises(ValueError):
        optimal_closed_walk(fig, {"H", "H1"})
    with pytest.raises(KeyError):
        optimal_closed_walk(fig, {"nope"})


def test_comp_charged_once_per_target():
    t = build("H", [("H", "A", 10), ("A", "B", 10)], [NodeSpec("A", comp_time=3), NodeSpec("B", comp_time=4)])
    w = optimal_closed_walk(t, {"A", "B"})
    assert w.nodes == ["H", "A", "B", "A", "H"]
    assert [x for _, x in w.hops] == [0, 13, 27, 37, 47]
    assert not walk_violations(t, w)
    # transit through a non-target costs no computation time
    w = optimal_closed_walk(t, {"B"})
    assert [x for _, x in w.hops] == [0, 10, 24, 34, 44]


def test_large_target_set_uses_heuristic_on_path():
    t = path_graph(25)
    w = optimal_closed_walk(t, set(t.managed))
    far = shortest_paths(t, "H").dist["P24"]
    assert walk_time(w) == 2 * far
    assert w.visit_order() == [f"P{i}" for i in range(25)]


def _case(seed, max_targets):
    rng = random.Random(seed)
    n = rng.randint(2, 11)
    names, edges = oracles.random_connected_edges(n, rng, extra=rng.choice([0, 0.4, 1.0]))
    t = build("H", edges, names)
    k = rng.randint(1, min(max_targets, n - 1))
    targets = set(rng.sample(list(t.managed), k))
    return t, edges, targets


@pytest.mark.parametrize("seed", range(220))
def test_exact_walk_matches_permutation_search(seed):
    t, edges, targets = _case(seed, 7)
    adj = oracles.adjacency(edges)
    order, cost = tour_order(t, targets)
    best_cost, best_order = oracles.permutation_tour(adj, "H", targets, order_key=node_sort_key)
    assert cost == best_cost
    assert order == best_order
    w = optimal_closed_walk(t, targets)
    assert walk_time(w) == best_cost == oracles.closed_walk_search(adj, "H", targets)
    assert not walk_violations(t, w)


@pytest.mark.parametrize("seed", range(120))
def test_heuristic_never_beats_exact(seed):
    t, _, targets = _case(seed, 7)
    exact = walk_time(optimal_closed_walk(t, targets))
    heuristic = optimal_closed_walk(t, targets, exact_limit=0)
    assert walk_time(heuristic) >= exact
    assert not walk_violations(t, heuristic)


@pytest.mark.parametrize("seed", range(40))
def test_lower_bound_and_validity_large(seed):
    rng = random.Random(seed)
    names, edges = oracles.random_connected_edges(rng.randint(12, 30), rng, lo=10, hi=100, extra=0.3)
    t = build("H", edges, names)
    targets = set(rng.sample(list(t.managed), rng.randint(1, len(t.managed))))
    w = optimal_closed_walk(t, targets)
    spt = shortest_paths(t, "H")
    assert walk_time(w) >= max(2 * spt.dist[v] for v in targets)
    assert not walk_violations(t, w)


def test_walk_violations_detects_problems(fig):
    good = optimal_closed_walk(fig, {"H1"})
    assert walk_violations(fig, good) == []
    broken = type(good)(good.hops[:1] + (("H7", 110.0),) + good.hops[1:], good.targets)
    assert any("not a link" in p for p in walk_violations(fig, broken))
    lying = type(good)(good.hops, frozenset({"H1", "H9"}))
    assert any("never visited" in p for p in walk_violations(fig, lying))


def test_expand_walk_keeps_given_order(fig):
    w = expand_walk(fig, ["H9", "H8"])
    assert w.visit_order() == ["H9", "H8"]
    assert walk_time(w) == 740
