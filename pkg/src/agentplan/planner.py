"""Delta-bounded multi-agent partitioning of the managed network.

The budget delta is the longest single-node round trip. Partitions are grown
around the farthest still-unassigned node (the anchor): first the unassigned
nodes on the anchor's shortest path, which the agent passes anyway, then any
other unassigned node, in rank order, whose inclusion keeps the partition's
optimal closed walk within delta. One data agent serves each partition.
"""

from __future__ import annotations

from dataclasses import dataclass

from agentplan.itinerary import EXACT_LIMIT, Walk, expand_walk, tour_order
from agentplan.routing import path_to, ranked_nodes, shortest_paths
from agentplan.topology import DisconnectedError, Topology, TopologyError, validate

MODELS = ("mmap", "accumulative", "interactive")
DELTA_RTOL = 1e-9


class InvariantViolation(RuntimeError):
    pass


@dataclass(frozen=True)
class Partition:
    anchor: str
    assigned: frozenset[str]
    walk: Walk

    @property
    def nodes(self) -> list[str]:
        """Assigned nodes in collection order."""
        return self.walk.visit_order()


@dataclass(frozen=True)
class Plan:
    model: str
    partitions: tuple[Partition, ...]
    delta: float
    agent_count: int
    makespan: float

    @property
    def node_count(self) -> int:
        return sum(len(p.assigned) for p in self.partitions)


@dataclass(frozen=True)
class PlanSummary:
    model: str
    nodes: int
    partitions: int
    agents: int
    delta: float
    makespan: float


def within(value: float, budget: float) -> bool:
    return value <= budget + DELTA_RTOL * max(1.0, abs(budget))


def _require_plannable(t: Topology) -> None:
    if not t.managed:
        raise TopologyError("network has no managed nodes")
    report = validate(t)
    if not report.ok:
        if "graph not connected" in report.violations:
            raise DisconnectedError("graph not connected")
        raise TopologyError("; ".join(report.violations))


def make_plan(model: str, partitions: list[Partition], delta: float) -> Plan:
    return Plan(
        model=model,
        partitions=tuple(partitions),
        delta=delta,
        agent_count=len(partitions),
        makespan=max(p.walk.time for p in partitions),
    )


def plan_mmap(t: Topology, exact_limit: int = EXACT_LIMIT) -> Plan:
    _require_plannable(t)
    ranking = ranked_nodes(t)
    delta = ranking[0].tour_time
    spt = shortest_paths(t, t.home)
    unassigned = [r.id for r in ranking]
    partitions = []
    while unassigned:
        anchor = unassigned[0]
        group = [anchor]
        order, _ = tour_order(t, group, exact_limit)
        on_path = [n for n in path_to(spt, anchor)[1:-1] if n in unassigned]
        rest = [n for n in unassigned[1:] if n not in on_path]
        for candidate in on_path + rest:
            trial_order, cost = tour_order(t, group + [candidate], exact_limit)
            if within(cost, delta):
                group.append(candidate)
                order = trial_order
        unassigned = [n for n in unassigned if n not in group]
        partitions.append(Partition(anchor, frozenset(group), expand_walk(t, order)))
    return make_plan("mmap", partitions, delta)


def plan_summary(p: Plan) -> PlanSummary:
    return PlanSummary(p.model, p.node_count, len(p.partitions), p.agent_count, p.delta, p.makespan)


def check_plan(t: Topology, p: Plan) -> None:
    """Raise :class:`InvariantViolation` if ``p`` breaks a plan invariant."""
    from agentplan.itinerary import walk_violations

    seen: set[str] = set()
    for part in p.partitions:
        if part.assigned & seen:
            raise InvariantViolation(f"nodes assigned twice: {sorted(part.assigned & seen)}")
        seen |= part.assigned
        if part.anchor not in part.assigned:
            raise InvariantViolation(f"anchor {part.anchor} not in its partition")
        if part.walk.targets != part.assigned:
            raise InvariantViolation("walk targets differ from assigned nodes")
        problems = walk_violations(t, part.walk)
        if problems:
            raise InvariantViolation(f"invalid walk for {part.anchor}: {problems[0]}")
        if p.model != "accumulative" and not within(part.walk.time, p.delta):
            raise InvariantViolation(f"partition {part.anchor} walk {part.walk.time} exceeds delta {p.delta}")
    if seen != set(t.managed):
        raise InvariantViolation(f"uncovered nodes: {sorted(set(t.managed) - seen)}")
    expected_agents = {"mmap": len(p.partitions), "accumulative": 1, "interactive": len(t.managed)}[p.model]
    if p.agent_count != expected_agents or p.agent_count != len(p.partitions):
        raise InvariantViolation(f"{p.model} plan has {p.agent_count} agents, expected {expected_agents}")
    if p.makespan != max(part.walk.time for part in p.partitions):
        raise InvariantViolation("makespan differs from the longest walk")
