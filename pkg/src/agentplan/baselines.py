"""Reference models: one agent for everything, or one clone per node."""

from __future__ import annotations

from agentplan.itinerary import EXACT_LIMIT, optimal_closed_walk
from agentplan.planner import Partition, Plan, _require_plannable, make_plan, plan_mmap
from agentplan.routing import ranked_nodes
from agentplan.topology import Topology


def plan_accumulative(t: Topology, exact_limit: int = EXACT_LIMIT) -> Plan:
    """A single agent collects every node on one closed walk, carrying the data along."""
    _require_plannable(t)
    ranking = ranked_nodes(t)
    walk = optimal_closed_walk(t, t.managed, exact_limit)
    part = Partition(ranking[0].id, frozenset(t.managed), walk)
    return make_plan("accumulative", [part], ranking[0].tour_time)


def plan_interactive(t: Topology) -> Plan:
    """One clone per managed node, each doing an out-and-back shortest-path trip.

    Makespan is therefore the farthest node's tour time.
    """
    _require_plannable(t)
    ranking = ranked_nodes(t)
    parts = [Partition(r.id, frozenset([r.id]), optimal_closed_walk(t, [r.id])) for r in ranking]
    return make_plan("interactive", parts, ranking[0].tour_time)


PLANNERS = {
    "mmap": plan_mmap,
    "accumulative": plan_accumulative,
    "interactive": plan_interactive,
}


def make(model: str, t: Topology) -> Plan:
    try:
        planner = PLANNERS[model]
    except KeyError:
        raise ValueError(f"unknown model {model!r}; choose from {sorted(PLANNERS)}") from None
    return planner(t)
