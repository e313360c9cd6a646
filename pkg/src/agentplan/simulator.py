"""Replay a plan as agent traversals and account time and traffic."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np

from agentplan.mib import MibRecord, synthesize_mib
from agentplan.planner import Plan
from agentplan.topology import Topology

TrafficMode = Literal["out_and_back", "hop_chain"]


class SimulationError(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    agent_base_bytes: int = 512
    payload_override_bytes: int | None = None
    time_scale: float | None = None
    interactive_traffic_mode: TrafficMode = "out_and_back"
    mib_seed: int | None = None  # attach synthetic MIB records to traces when set

    def __post_init__(self):
        if self.agent_base_bytes < 0:
            raise ValueError("agent_base_bytes must be >= 0")
        if self.payload_override_bytes is not None and self.payload_override_bytes < 0:
            raise ValueError("payload_override_bytes must be >= 0")
        if self.time_scale is not None and not self.time_scale > 0:
            raise ValueError("time_scale must be positive")
        if self.interactive_traffic_mode not in ("out_and_back", "hop_chain"):
            raise ValueError(f"unknown interactive_traffic_mode {self.interactive_traffic_mode!r}")


@dataclass(frozen=True)
class TraceEvent:
    time: float
    node: str
    kind: Literal["arrive", "collect", "return_home"]
    carried_bytes: int


@dataclass(frozen=True)
class AgentTrace:
    agent_id: int
    anchor: str
    events: tuple[TraceEvent, ...]
    records: tuple[MibRecord, ...] = ()

    @property
    def end_time(self) -> float:
        return self.events[-1].time


@dataclass(frozen=True)
class Metrics:
    makespan: float
    agent_count: int
    traffic_byte_hops: int
    traffic_byte_latency: float
    collected_nodes: int
    per_node_collect_time: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class CollectionReport:
    complete: bool
    missing: frozenset[str]
    duplicates: frozenset[str]


def _payload(t: Topology, node: str, cfg: SimConfig) -> int:
    if cfg.payload_override_bytes is not None:
        return cfg.payload_override_bytes
    return t.spec(node).payload_bytes


def simulate(t: Topology, plan: Plan, cfg: SimConfig = SimConfig()) -> tuple[Metrics, list[AgentTrace]]:
    """Walk every agent through its partition.

    An agent leaves home carrying ``agent_base_bytes`` and grows by each
    assigned node's payload at the first arrival there. Traffic is charged per
    hop with the bytes carried while crossing it.
    """
    hop_chain = plan.model == "interactive" and cfg.interactive_traffic_mode == "hop_chain"
    traces: list[AgentTrace] = []
    byte_hops = 0
    byte_latency = 0.0
    collect_time: dict[str, float] = {}

    for agent_id, part in enumerate(plan.partitions):
        hops = part.walk.hops
        if not hops or hops[0][0] != t.home or hops[-1][0] != t.home:
            raise SimulationError(f"agent {agent_id}: walk must start and end at home")
        carried = cfg.agent_base_bytes
        clock = 0.0
        events: list[TraceEvent] = []
        records: list[MibRecord] = []
        collected: set[str] = set()
        first_target = hops.index(next(h for h in hops if h[0] in part.assigned))
        for k in range(1, len(hops)):
            u, v = hops[k - 1][0], hops[k][0]
            if u not in t or v not in t:
                raise SimulationError(f"agent {agent_id}: node {u if u not in t else v} not in topology")
            w = float(t.weights[t.idx(u), t.idx(v)])
            if u == v or not np.isfinite(w):
                raise SimulationError(f"agent {agent_id}: {u}->{v} is not a link")
            # hop_chain clones are spawned next door; only the last outbound hop travels
            if not (hop_chain and k < first_target):
                byte_hops += carried
                byte_latency += carried * w
            clock += w
            if k == len(hops) - 1:
                events.append(TraceEvent(clock, v, "return_home", carried))
                break
            events.append(TraceEvent(clock, v, "arrive", carried))
            if v in part.assigned and v not in collected:
                collected.add(v)
                clock += t.spec(v).comp_time
                payload = _payload(t, v, cfg)
                carried += payload
                events.append(TraceEvent(clock, v, "collect", carried))
                collect_time[v] = clock
                if cfg.mib_seed is not None:
                    records.append(synthesize_mib(t, v, cfg.mib_seed, clock, payload))
        if not np.isclose(clock, part.walk.time, rtol=1e-9, atol=1e-9):
            raise SimulationError(f"agent {agent_id}: replayed time {clock} != planned {part.walk.time}")
        traces.append(AgentTrace(agent_id, part.anchor, tuple(events), tuple(records)))

    metrics = Metrics(
        makespan=max(tr.end_time for tr in traces),
        agent_count=len(traces),
        traffic_byte_hops=int(byte_hops),
        traffic_byte_latency=float(byte_latency),
        collected_nodes=len(collect_time),
        per_node_collect_time=dict(sorted(collect_time.items(), key=lambda kv: t.idx(kv[0]))),
    )
    if cfg.time_scale is not None:
        metrics, traces = _rescale(metrics, traces, cfg.time_scale)
    return metrics, traces


def _rescale(m: Metrics, traces: list[AgentTrace], s: float) -> tuple[Metrics, list[AgentTrace]]:
    m = replace(
        m,
        makespan=m.makespan * s,
        traffic_byte_latency=m.traffic_byte_latency * s,
        per_node_collect_time={k: v * s for k, v in m.per_node_collect_time.items()},
    )
    traces = [
        replace(tr, events=tuple(replace(e, time=e.time * s) for e in tr.events)) for tr in traces
    ]
    return m, traces


def collection_report(traces: list[AgentTrace], t: Topology) -> CollectionReport:
    counts: dict[str, int] = {}
    for tr in traces:
        for e in tr.events:
            if e.kind == "collect":
                counts[e.node] = counts.get(e.node, 0) + 1
    missing = frozenset(n for n in t.managed if n not in counts)
    duplicates = frozenset(n for n, c in counts.items() if c > 1)
    return CollectionReport(not missing and not duplicates, missing, duplicates)
