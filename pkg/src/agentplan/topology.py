"""Network model: nodes, weighted undirected links, a home (manager) node.

Topologies are immutable. Derived arrays (weight matrix, all-pairs shortest
paths) are computed lazily and cached on the instance.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np

from agentplan import _kernels

DEFAULT_PAYLOAD_BYTES = 1024

_ID_RE = re.compile(r"^[A-Za-z0-9_]+$")
_DIGITS = re.compile(r"(\d+)")


class TopologyError(ValueError):
    pass


class TopologyParseError(TopologyError):
    def __init__(self, lineno: int, reason: str):
        super().__init__(f"line {lineno}: {reason}")
        self.lineno = lineno
        self.reason = reason


class UnknownNodeError(TopologyError, KeyError):
    def __str__(self) -> str:
        return f"unknown node {self.args[0]!r}"


class DisconnectedError(TopologyError):
    pass


def node_sort_key(node_id: str) -> tuple:
    """Natural ordering for node labels: ``H < H0 < H1 < H2 < H10``."""
    parts = _DIGITS.split(node_id)
    return tuple((0, int(p), "") if p.isdigit() else (1, 0, p) for p in parts if p)


@dataclass(frozen=True)
class NodeSpec:
    id: str
    comp_time: float = 0.0
    payload_bytes: int = DEFAULT_PAYLOAD_BYTES


@dataclass(frozen=True)
class Edge:
    u: str
    v: str
    weight: float

    def normalized(self) -> Edge:
        if node_sort_key(self.v) < node_sort_key(self.u):
            return Edge(self.v, self.u, self.weight)
        return self

    @property
    def key(self) -> tuple:
        e = self.normalized()
        return (node_sort_key(e.u), node_sort_key(e.v))


@dataclass(frozen=True)
class Topology:
    """Undirected weighted graph of managed nodes.

    Node and edge tuples are stored in canonical order (nodes by natural id
    order, edges by their normalized endpoint pair), so two topologies built
    from the same content in any order compare equal. The integer index of a
    node is its position in :attr:`nodes`.
    """

    nodes: tuple[NodeSpec, ...]
    edges: tuple[Edge, ...] = ()
    home: str = "H"

    def __post_init__(self):
        nodes = tuple(sorted(self.nodes, key=lambda s: node_sort_key(s.id)))
        edges = tuple(sorted((e.normalized() for e in self.edges), key=lambda e: (e.key, e.weight)))
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", edges)

    # ---- lookups
    @cached_property
    def ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.nodes)

    @cached_property
    def index(self) -> dict[str, int]:
        return {s.id: i for i, s in enumerate(self.nodes)}

    @property
    def home_index(self) -> int:
        return self.idx(self.home)

    @property
    def managed(self) -> tuple[str, ...]:
        """Non-home node ids in id order."""
        return tuple(i for i in self.ids if i != self.home)

    def idx(self, node_id: str) -> int:
        try:
            return self.index[node_id]
        except KeyError:
            raise UnknownNodeError(node_id) from None

    def spec(self, node_id: str) -> NodeSpec:
        return self.nodes[self.idx(node_id)]

    def __contains__(self, node_id: object) -> bool:
        return node_id in self.index

    def __len__(self) -> int:
        return len(self.nodes)

    # ---- numeric views
    @cached_property
    def weights(self) -> np.ndarray:
        """Dense weight matrix, ``inf`` where no link exists, 0 on the diagonal."""
        n = len(self.nodes)
        W = np.full((n, n), np.inf)
        np.fill_diagonal(W, 0.0)
        for e in self.edges:
            if e.u == e.v or e.u not in self.index or e.v not in self.index:
                continue
            a, b = self.index[e.u], self.index[e.v]
            w = min(W[a, b], e.weight)
            W[a, b] = W[b, a] = w
        return W

    @cached_property
    def comp_times(self) -> np.ndarray:
        return np.array([s.comp_time for s in self.nodes], dtype=float)

    @cached_property
    def all_pairs(self) -> tuple[np.ndarray, np.ndarray]:
        """``(dist, parent)`` matrices; row ``s`` is the shortest-path tree from ``s``."""
        return _kernels.all_pairs(np.ascontiguousarray(self.weights))

    def weight(self, u: str, v: str) -> float:
        w = self.weights[self.idx(u), self.idx(v)]
        if u == v or not np.isfinite(w):
            raise TopologyError(f"no link between {u} and {v}")
        return float(w)


def neighbors(t: Topology, node_id: str) -> list[tuple[str, float]]:
    """Adjacent nodes of ``node_id`` with link weights, ascending by id."""
    row = t.weights[t.idx(node_id)]
    return [(t.ids[j], float(row[j])) for j in np.flatnonzero(np.isfinite(row)) if t.ids[j] != node_id]


# ------------------------------------------------------------- validation

@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate(t: Topology) -> ValidationReport:
    """Check every topology invariant and collect all violations found."""
    problems: list[str] = []
    seen_ids: set[str] = set()
    for s in t.nodes:
        if s.id in seen_ids:
            problems.append(f"duplicate node {s.id}")
        seen_ids.add(s.id)
        if s.comp_time < 0:
            problems.append(f"negative comp_time at {s.id}")
        if s.payload_bytes < 0:
            problems.append(f"negative payload_bytes at {s.id}")
    if t.home not in seen_ids:
        problems.append(f"home {t.home} not present")
    elif t.spec(t.home).comp_time != 0:
        problems.append("home comp_time must be 0")

    pairs: set[tuple[str, str]] = set()
    for e in t.edges:
        if e.u == e.v:
            problems.append(f"self-loop at {e.u}")
        for end in (e.u, e.v):
            if end not in seen_ids:
                problems.append(f"edge endpoint {end} not present")
        if not e.weight > 0:
            problems.append(f"nonpositive weight on edge {e.u}-{e.v}")
        pair = (e.u, e.v)
        if pair in pairs:
            problems.append(f"duplicate edge {e.u}-{e.v}")
        pairs.add(pair)

    if t.home in seen_ids and not _connected(t):
        problems.append("graph not connected")
    return ValidationReport(tuple(problems))


def _connected(t: Topology) -> bool:
    adj: dict[str, list[str]] = {i: [] for i in t.ids}
    for e in t.edges:
        if e.u in adj and e.v in adj:
            adj[e.u].append(e.v)
            adj[e.v].append(e.u)
    seen = {t.home}
    queue = deque([t.home])
    while queue:
        for nxt in adj[queue.popleft()]:
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return len(seen) == len(adj)


# ---------------------------------------------------------------- file I/O

def _number(token: str, lineno: int, what: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise TopologyParseError(lineno, f"{what} {token!r} is not a number") from None
    if not np.isfinite(value):
        raise TopologyParseError(lineno, f"{what} must be finite")
    return value


def _check_id(token: str, lineno: int) -> str:
    if not _ID_RE.match(token):
        raise TopologyParseError(lineno, f"invalid node id {token!r}")
    return token


def parse_topology(text: str) -> Topology:
    """Parse the line-oriented topology format.

    Recognized lines: ``home <id>``, ``node <id> [comp=<t>] [payload=<bytes>]``,
    ``edge <id> <id> <weight>``; ``#`` starts a comment. Every edge endpoint
    must be declared by a ``home`` or ``node`` line (anywhere in the file).

    Raises:
        TopologyParseError: on the first malformed line, duplicate edge,
            nonpositive weight, undeclared node or missing ``home``.
    """
    home: str | None = None
    specs: dict[str, NodeSpec] = {}
    raw_edges: list[tuple[int, str, str, float]] = []

    for lineno, line in enumerate(text.splitlines(), 1):
        tokens = line.split("#", 1)[0].split()
        if not tokens:
            continue
        kind, args = tokens[0], tokens[1:]
        if kind == "home":
            if len(args) != 1:
                raise TopologyParseError(lineno, "expected: home <id>")
            if home is not None:
                raise TopologyParseError(lineno, "home declared more than once")
            home = _check_id(args[0], lineno)
            specs.setdefault(home, NodeSpec(home))
        elif kind == "node":
            if not args:
                raise TopologyParseError(lineno, "expected: node <id> [comp=<t>] [payload=<bytes>]")
            node_id = _check_id(args[0], lineno)
            comp, payload = 0.0, DEFAULT_PAYLOAD_BYTES
            for opt in args[1:]:
                name, eq, value = opt.partition("=")
                if not eq:
                    raise TopologyParseError(lineno, f"malformed option {opt!r}")
                if name == "comp":
                    comp = _number(value, lineno, "comp")
                    if comp < 0:
                        raise TopologyParseError(lineno, "comp must be non-negative")
                elif name == "payload":
                    if not value.isdigit():
                        raise TopologyParseError(lineno, "payload must be a non-negative integer")
                    payload = int(value)
                else:
                    raise TopologyParseError(lineno, f"unknown option {name!r}")
            if node_id in specs and node_id != home:
                raise TopologyParseError(lineno, f"node {node_id} declared more than once")
            specs[node_id] = NodeSpec(node_id, comp, payload)
        elif kind == "edge":
            if len(args) != 3:
                raise TopologyParseError(lineno, "expected: edge <id> <id> <weight>")
            u, v = _check_id(args[0], lineno), _check_id(args[1], lineno)
            if u == v:
                raise TopologyParseError(lineno, f"self-loop at {u}")
            w = _number(args[2], lineno, "weight")
            if w <= 0:
                raise TopologyParseError(lineno, "weight must be positive")
            raw_edges.append((lineno, u, v, w))
        else:
            raise TopologyParseError(lineno, f"unknown directive {kind!r}")

    if home is None:
        raise TopologyParseError(0, "missing home declaration")
    if specs[home].comp_time != 0:
        raise TopologyParseError(0, "home comp must be 0")

    edges: list[Edge] = []
    seen: set[tuple] = set()
    for lineno, u, v, w in raw_edges:
        for end in (u, v):
            if end not in specs:
                raise TopologyParseError(lineno, f"unknown node {end}")
        e = Edge(u, v, w)
        if e.key in seen:
            raise TopologyParseError(lineno, f"duplicate edge {u}-{v}")
        seen.add(e.key)
        edges.append(e)
    return Topology(tuple(specs.values()), tuple(edges), home)


def format_number(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def serialize_topology(t: Topology) -> str:
    lines = [f"home {t.home}"]
    for s in t.nodes:
        opts = []
        if s.comp_time:
            opts.append(f"comp={format_number(s.comp_time)}")
        if s.payload_bytes != DEFAULT_PAYLOAD_BYTES:
            opts.append(f"payload={s.payload_bytes}")
        if s.id == t.home and not opts:
            continue
        lines.append(" ".join([f"node {s.id}", *opts]))
    for e in t.edges:
        lines.append(f"edge {e.u} {e.v} {format_number(e.weight)}")
    return "\n".join(lines) + "\n"


def load_topology(path) -> Topology:
    with open(path, encoding="utf-8") as fh:
        return parse_topology(fh.read())


# ---------------------------------------------------------------- builders

def build(home: str, edges: Iterable[tuple[str, str, float]], nodes: Iterable[str | NodeSpec] = ()) -> Topology:
    """Convenience constructor: nodes are implied by home and edge endpoints."""
    specs = {home: NodeSpec(home)}
    for n in nodes:
        s = n if isinstance(n, NodeSpec) else NodeSpec(n)
        specs[s.id] = s
    edge_list = []
    for u, v, w in edges:
        edge_list.append(Edge(u, v, float(w)))
        for end in (u, v):
            specs.setdefault(end, NodeSpec(end))
    return Topology(tuple(specs.values()), tuple(edge_list), home)


def generate_random(
    n: int,
    seed: int,
    weight_range: tuple[int, int] = (10, 100),
    extra_edge_fraction: float = 0.0,
) -> Topology:
    """Random connected topology with ``n`` nodes in total (home included).

    A uniformly random labelled spanning tree (Prüfer sequence) guarantees
    connectivity; ``floor(extra_edge_fraction * n)`` further distinct links are
    then sampled from the non-tree pairs. Weights are integers drawn uniformly
    from the inclusive ``weight_range``. Node 0 is the home ``H``; the others
    are ``H0 .. H{n-2}``.
    """
    import networkx as nx

    lo, hi = weight_range
    if n < 1:
        raise ValueError("n must be >= 1")
    if not lo > 0 or hi < lo:
        raise ValueError("weight_range must satisfy 0 < lo <= hi")
    if not 0.0 <= extra_edge_fraction <= 1.0:
        raise ValueError("extra_edge_fraction must lie in [0, 1]")

    rng = np.random.default_rng(seed)
    names = ["H"] + [f"H{i}" for i in range(n - 1)]
    if n == 1:
        pairs: list[tuple[int, int]] = []
    elif n == 2:
        pairs = [(0, 1)]
    else:
        tree = nx.from_prufer_sequence([int(x) for x in rng.integers(0, n, size=n - 2)])
        pairs = sorted(tuple(sorted(e)) for e in tree.edges())

    k = int(np.floor(extra_edge_fraction * n))
    if k:
        taken = set(pairs)
        free = [(a, b) for a in range(n) for b in range(a + 1, n) if (a, b) not in taken]
        k = min(k, len(free))
        picks = rng.choice(len(free), size=k, replace=False) if k else []
        pairs = sorted(pairs + [free[int(p)] for p in picks])

    weights = rng.integers(int(np.ceil(lo)), int(np.floor(hi)) + 1, size=len(pairs))
    edges = tuple(Edge(names[a], names[b], float(w)) for (a, b), w in zip(pairs, weights))
    return Topology(tuple(NodeSpec(s) for s in names), edges, "H")
