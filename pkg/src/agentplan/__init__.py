"""Plan and simulate MIB collection from SNMP-managed networks with mobile agents."""

from agentplan.baselines import plan_accumulative, plan_interactive
from agentplan.itinerary import Walk, optimal_closed_walk, walk_time
from agentplan.mib import MibRecord, deserialize, serialize, synthesize_mib
from agentplan.planner import InvariantViolation, Partition, Plan, PlanSummary, plan_mmap, plan_summary
from agentplan.routing import RankedNode, ShortestPathTree, path_to, ranked_nodes, shortest_paths, tour_time
from agentplan.simulator import AgentTrace, Metrics, SimConfig, collection_report, simulate
from agentplan.topology import (
    Edge,
    NodeSpec,
    Topology,
    TopologyError,
    TopologyParseError,
    generate_random,
    load_topology,
    neighbors,
    parse_topology,
    serialize_topology,
    validate,
)

__version__ = "0.1.0"
