"""Synthetic per-node MIB snapshots with an exact-size binary encoding.

Wire format (big-endian)::

    u16 len, node id (utf-8)
    f64 snapshot_time
    u16 variable count
    per variable: u16 len, name (utf-8), u64 counter
    zero padding up to the node's payload size
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass

import numpy as np

from agentplan.topology import Topology, TopologyError

DEFAULT_VARIABLES = ("ifInOctets", "ifOutOctets", "sysUpTime")

_U16 = struct.Struct(">H")
_U64 = struct.Struct(">Q")
_F64 = struct.Struct(">d")


class MibEncodingError(ValueError):
    pass


@dataclass(frozen=True)
class MibRecord:
    node: str
    variables: tuple[tuple[str, int], ...]
    snapshot_time: float
    size_bytes: int

    def __post_init__(self):
        names = [n for n, _ in self.variables]
        if len(set(names)) != len(names):
            raise ValueError("variable names must be unique")


def _text(s: str) -> bytes:
    raw = s.encode("utf-8")
    return _U16.pack(len(raw)) + raw


def serialize(rec: MibRecord) -> bytes:
    body = bytearray(_text(rec.node))
    body += _F64.pack(rec.snapshot_time)
    body += _U16.pack(len(rec.variables))
    for name, value in rec.variables:
        body += _text(name) + _U64.pack(value)
    if len(body) > rec.size_bytes:
        raise MibEncodingError(f"record for {rec.node} needs {len(body)} bytes, payload is {rec.size_bytes}")
    return bytes(body) + bytes(rec.size_bytes - len(body))


def deserialize(data: bytes) -> MibRecord:
    view = memoryview(data)
    pos = 0

    def take(n: int) -> memoryview:
        nonlocal pos
        if pos + n > len(view):
            raise MibEncodingError("truncated record")
        chunk = view[pos:pos + n]
        pos += n
        return chunk

    def text() -> str:
        (n,) = _U16.unpack(take(2))
        return bytes(take(n)).decode("utf-8")

    node = text()
    (snapshot,) = _F64.unpack(take(8))
    (count,) = _U16.unpack(take(2))
    variables = []
    for _ in range(count):
        name = text()
        (value,) = _U64.unpack(take(8))
        variables.append((name, value))
    if any(view[pos:]):
        raise MibEncodingError("non-zero bytes in padding")
    return MibRecord(node, tuple(variables), snapshot, len(data))


def synthesize_mib(
    t: Topology, node_id: str, seed: int, snapshot_time: float = 0.0, payload_bytes: int | None = None
) -> MibRecord:
    """Deterministic placeholder counters for ``node_id``, sized to its payload.

    ``payload_bytes`` overrides the size declared on the node.
    """
    spec = t.spec(node_id)
    if node_id == t.home:
        raise TopologyError("the home node has no MIB to collect")
    rng = np.random.default_rng([seed, zlib.crc32(node_id.encode("utf-8"))])
    values = rng.integers(0, 2**63, size=len(DEFAULT_VARIABLES), dtype=np.uint64)
    rec = MibRecord(
        node_id,
        tuple((name, int(v)) for name, v in zip(DEFAULT_VARIABLES, values)),
        float(snapshot_time),
        spec.payload_bytes if payload_bytes is None else payload_bytes,
    )
    serialize(rec)  # fail early if the payload is too small
    return rec
