"""Minimum-time closed walks from home through a set of target nodes.

Walks are planned on the metric closure (shortest-path distances between
home and the targets). Up to :data:`EXACT_LIMIT` targets the optimum is
computed exactly with a Held-Karp DP; above that a nearest-neighbour tour
improved by 2-opt is used. Each leg is then expanded into real hops along
the shortest-path tree of the leg's start node, so a walk may pass through
(and revisit) non-target nodes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from agentplan import _kernels
from agentplan.topology import Topology, TopologyError

EXACT_LIMIT = 10


@dataclass(frozen=True)
class Walk:
    """Closed route: ``hops`` are ``(node, cumulative_time)`` from home back to home."""

    hops: tuple[tuple[str, float], ...]
    targets: frozenset[str]

    @property
    def nodes(self) -> list[str]:
        return [n for n, _ in self.hops]

    @property
    def time(self) -> float:
        return self.hops[-1][1]

    def visit_order(self) -> list[str]:
        """Targets in the order they are first reached."""
        seen: list[str] = []
        for node, _ in self.hops:
            if node in self.targets and node not in seen:
                seen.append(node)
        return seen


def walk_time(w: Walk) -> float:
    return w.time


def _target_indices(t: Topology, targets: Iterable[str]) -> np.ndarray:
    targets = set(targets)
    if not targets:
        raise ValueError("targets must be non-empty")
    if t.home in targets:
        raise ValueError("home node cannot be a target")
    return np.array(sorted(t.idx(x) for x in targets), dtype=np.int64)


def closure_matrix(t: Topology, idx: np.ndarray) -> np.ndarray:
    """Shortest-path distances among ``[home, *idx]``."""
    D, _ = t.all_pairs
    stops = np.concatenate(([t.home_index], idx))
    C = np.ascontiguousarray(D[np.ix_(stops, stops)])
    if not np.isfinite(C).all():
        raise TopologyError("targets not reachable from home")
    return C


def tour_order(t: Topology, targets: Iterable[str], exact_limit: int = EXACT_LIMIT) -> tuple[list[str], float]:
    """Best visiting order for ``targets`` and the resulting walk time.

    Cheaper than :func:`optimal_closed_walk` because the walk is not expanded
    into hops; the planner calls this in its inner loop.
    """
    idx = _target_indices(t, targets)
    C = closure_matrix(t, idx)
    if len(idx) <= exact_limit:
        order, length = _kernels.held_karp(C)
    else:
        order, length = _kernels.heuristic_tour(C)
    nodes = [t.ids[idx[k - 1]] for k in order]
    return nodes, float(length) + float(t.comp_times[idx].sum())


def expand_walk(t: Topology, order: list[str], targets: Iterable[str] | None = None) -> Walk:
    """Turn a target visiting order into hop-level walk with cumulative times.

    Computation time is charged once per target, on the first arrival.
    """
    targets = frozenset(order if targets is None else targets)
    _, P = t.all_pairs
    W = t.weights
    comp = t.comp_times
    stops = [t.home_index] + [t.idx(x) for x in order] + [t.home_index]
    hops = [(t.home, 0.0)]
    clock = 0.0
    charged: set[int] = set()
    for a, b in zip(stops, stops[1:]):
        leg = [b]
        while leg[-1] != a:
            leg.append(int(P[a, leg[-1]]))
        prev = a
        for node in reversed(leg[:-1]):
            clock += W[prev, node]
            if t.ids[node] in targets and node not in charged:
                charged.add(node)
                clock += comp[node]
            hops.append((t.ids[node], float(clock)))
            prev = node
    return Walk(tuple(hops), targets)


def optimal_closed_walk(t: Topology, targets: Iterable[str], exact_limit: int = EXACT_LIMIT) -> Walk:
    """Shortest closed walk from home covering every target.

    Exact (lexicographically smallest optimal order on ties) for at most
    ``exact_limit`` targets, nearest-neighbour + 2-opt otherwise.
    """
    order, _ = tour_order(t, targets, exact_limit)
    return expand_walk(t, order)


def walk_violations(t: Topology, w: Walk) -> list[str]:
    """Check a walk against ``t``; an empty list means it is valid."""
    problems = []
    if not w.hops or w.hops[0] != (t.home, 0.0) or w.hops[-1][0] != t.home:
        problems.append("walk must start at home with time 0 and end at home")
    missing = w.targets - set(w.nodes)
    if missing:
        problems.append(f"targets never visited: {sorted(missing)}")
    seen: set[str] = set()
    for (u, tu), (v, tv) in zip(w.hops, w.hops[1:]):
        if v not in t or u not in t or not np.isfinite(t.weights[t.idx(u), t.idx(v)]) or u == v:
            problems.append(f"{u}->{v} is not a link")
            continue
        step = t.weight(u, v)
        if v in w.targets and v not in seen:
            step += t.spec(v).comp_time
        seen.add(v)
        if not np.isclose(tv - tu, step, rtol=1e-9, atol=1e-9):
            problems.append(f"time step {u}->{v} is {tv - tu}, expected {step}")
    return problems
