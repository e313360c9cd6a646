"""Shortest-path latencies from home and per-node round-trip tour times."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from agentplan.topology import DisconnectedError, Topology, TopologyError, UnknownNodeError


@dataclass(frozen=True)
class ShortestPathTree:
    source: str
    dist: dict[str, float]
    parent: dict[str, str]


@dataclass(frozen=True)
class RankedNode:
    id: str
    tour_time: float


def shortest_paths(t: Topology, source: str) -> ShortestPathTree:
    """Dijkstra from ``source``.

    Among equal-cost predecessors the one with the lowest id wins, so the
    tree (and every path read from it) is deterministic.
    """
    s = t.idx(source)
    D, P = t.all_pairs
    dist, parent = D[s], P[s]
    unreachable = [t.ids[i] for i in np.flatnonzero(~np.isfinite(dist))]
    if unreachable:
        raise DisconnectedError(f"unreachable from {source}: {', '.join(unreachable)}")
    return ShortestPathTree(
        source=source,
        dist={t.ids[i]: float(d) for i, d in enumerate(dist)},
        parent={t.ids[i]: t.ids[p] for i, p in enumerate(parent) if p >= 0},
    )


def path_to(spt: ShortestPathTree, target: str) -> list[str]:
    if target not in spt.dist:
        raise UnknownNodeError(target)
    path = [target]
    while path[-1] != spt.source:
        path.append(spt.parent[path[-1]])
    return path[::-1]


def tour_time(t: Topology, spt: ShortestPathTree, node_id: str) -> float:
    """Round trip home -> node -> home plus the node's computation time."""
    spec = t.spec(node_id)
    if node_id == t.home:
        raise TopologyError("tour time of the home node is undefined")
    return spec.comp_time + 2 * spt.dist[node_id]


def ranked_nodes(t: Topology) -> list[RankedNode]:
    """Non-home nodes by tour time, longest first (ties: id ascending).

    The first entry's tour time is the partition budget delta.
    """
    if not t.managed:
        raise TopologyError("network has no managed nodes")
    spt = shortest_paths(t, t.home)
    ranked = [RankedNode(i, tour_time(t, spt, i)) for i in t.managed]
    # t.managed is already id-ordered and sort is stable
    ranked.sort(key=lambda r: -r.tour_time)
    return ranked


def delta(t: Topology) -> float:
    return ranked_nodes(t)[0].tour_time
