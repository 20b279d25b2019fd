"""Mycelium network graphs: nodes (tips, junctions, fruit bodies) and strands.

The graph is undirected. Strand lengths are always the Euclidean distance
between their endpoint positions; edits that move nodes recompute lengths on
the spot so the invariant never drifts. Serialization is a versioned
plain-text format; floats are written with repr() so saved files round-trip
bit-exactly and identical networks serialize byte-for-byte identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DimensionError, NotFoundError, ParseError

NODE_KINDS = ("tip", "junction", "fruit-body")
STRAND_STATES = ("active", "abandoned", "enhanced")
TERMINAL_KINDS = ("tip", "fruit-body")
NETWORK_FORMAT = "myceliumsim/network/v1"


@dataclass
class Node:
    id: int
    position: tuple[float, ...]
    kind: str
    # growth bookkeeping, not persisted:
    direction: tuple[float, ...] | None = None
    blocked: int = 0


@dataclass
class Strand:
    id: int
    a: int
    b: int
    length_mm: float
    state: str = "active"

    @property
    def conducts(self) -> bool:
        return self.state != "abandoned"

    def other(self, node_id: int) -> int:
        if node_id == self.a:
            return self.b
        if node_id == self.b:
            return self.a
        raise NotFoundError(f"node {node_id} is not an endpoint of strand {self.id}")


def _distance(p, q) -> float:
    return math.dist(p, q)


class MyceliumNetwork:
    """Mutable undirected graph of nodes and strands with integer ids."""

    def __init__(self, seed: int | None = None):
        self.seed = seed
        self.nodes: dict[int, Node] = {}
        self.strands: dict[int, Strand] = {}
        self._incident: dict[int, list[int]] = {}
        self._next_node_id = 0
        self._next_strand_id = 0

    # -- construction -----------------------------------------------------

    def add_node(self, position, kind: str, direction=None) -> Node:
        if kind not in NODE_KINDS:
            raise DimensionError(f"unknown node kind {kind!r}")
        position = tuple(float(x) for x in position)
        if len(position) not in (2, 3):
            raise DimensionError(f"positions must be 2D or 3D, got {position}")
        if self.nodes and len(position) != self.ndim:
            raise DimensionError(f"position {position} has arity {len(position)}, network is {self.ndim}D")
        if direction is not None:
            direction = tuple(float(x) for x in direction)
            if len(direction) != len(position):
                raise DimensionError("direction arity must match position arity")
        node = Node(self._next_node_id, position, kind, direction=direction)
        self.nodes[node.id] = node
        self._incident[node.id] = []
        self._next_node_id += 1
        return node

    def add_strand(self, a: int, b: int, state: str = "active") -> Strand:
        if a not in self.nodes:
            raise NotFoundError(f"no node {a}")
        if b not in self.nodes:
            raise NotFoundError(f"no node {b}")
        if a == b:
            raise DimensionError(f"self-loop strand at node {a} not allowed")
        if state not in STRAND_STATES:
            raise DimensionError(f"unknown strand state {state!r}")
        length = _distance(self.nodes[a].position, self.nodes[b].position)
        strand = Strand(self._next_strand_id, a, b, length, state)
        self.strands[strand.id] = strand
        self._incident[a].append(strand.id)
        self._incident[b].append(strand.id)
        self._next_strand_id += 1
        return strand

    # -- queries ----------------------------------------------------------

    @property
    def ndim(self) -> int:
        if not self.nodes:
            raise DimensionError("empty network has no dimensionality")
        return len(next(iter(self.nodes.values())).position)

    def incident_strands(self, node_id: int) -> list[int]:
        """Ids of all strands touching the node, ascending."""
        if node_id not in self.nodes:
            raise NotFoundError(f"no node {node_id}")
        return sorted(self._incident[node_id])

    def conductive_strands(self, node_id: int) -> list[int]:
        return [sid for sid in self.incident_strands(node_id) if self.strands[sid].conducts]

    def degree(self, node_id: int) -> int:
        return len(self.incident_strands(node_id))

    def nodes_of_kind(self, kind: str) -> list[int]:
        return sorted(nid for nid, n in self.nodes.items() if n.kind == kind)

    def branch_count(self) -> int:
        """Junction nodes of degree >= 3, i.e. realized branch points."""
        return sum(1 for nid, n in self.nodes.items() if n.kind == "junction" and self.degree(nid) >= 3)

    # -- edits ------------------------------------------------------------

    def move_node(self, node_id: int, position) -> None:
        """Reposition a node and recompute the lengths of its strands."""
        if node_id not in self.nodes:
            raise NotFoundError(f"no node {node_id}")
        position = tuple(float(x) for x in position)
        if len(position) != self.ndim:
            raise DimensionError(f"position {position} has arity {len(position)}, network is {self.ndim}D")
        self.nodes[node_id].position = position
        for sid in self._incident[node_id]:
            s = self.strands[sid]
            s.length_mm = _distance(self.nodes[s.a].position, self.nodes[s.b].position)

    def set_strand_state(self, strand_id: int, state: str) -> None:
        if strand_id not in self.strands:
            raise NotFoundError(f"no strand {strand_id}")
        if state not in STRAND_STATES:
            raise DimensionError(f"unknown strand state {state!r}")
        self.strands[strand_id].state = state

    def copy(self) -> "MyceliumNetwork":
        out = MyceliumNetwork(seed=self.seed)
        out.nodes = {
            nid: Node(n.id, n.position, n.kind, direction=n.direction, blocked=n.blocked)
            for nid, n in self.nodes.items()
        }
        out.strands = {sid: Strand(s.id, s.a, s.b, s.length_mm, s.state) for sid, s in self.strands.items()}
        out._incident = {nid: list(sids) for nid, sids in self._incident.items()}
        out._next_node_id = self._next_node_id
        out._next_strand_id = self._next_strand_id
        return out

    def validate(self, field: "object | None" = None) -> None:
        """Check structural invariants; raises on violation.

        With a substrate field given, also checks every node sits in a
        growable cell.
        """
        for sid, s in self.strands.items():
            if s.a not in self.nodes or s.b not in self.nodes:
                raise NotFoundError(f"strand {sid} references a missing node")
            if s.a == s.b:
                raise DimensionError(f"strand {sid} is a self-loop")
            if s.state not in STRAND_STATES:
                raise DimensionError(f"strand {sid} has unknown state {s.state!r}")
            want = _distance(self.nodes[s.a].position, self.nodes[s.b].position)
            if abs(s.length_mm - want) > 1e-9:
                raise DimensionError(f"strand {sid} length {s.length_mm} != endpoint distance {want}")
        dim = None
        for nid, n in self.nodes.items():
            if n.kind not in NODE_KINDS:
                raise DimensionError(f"node {nid} has unknown kind {n.kind!r}")
            if n.kind == "fruit-body" and not self._incident.get(nid):
                raise DimensionError(f"fruit-body node {nid} has no incident strand")
            if dim is None:
                dim = len(n.position)
            elif len(n.position) != dim:
                raise DimensionError(f"node {nid} arity {len(n.position)} != network arity {dim}")
            if field is not None and not field.is_growable(n.position):
                raise DimensionError(f"node {nid} at {n.position} is outside the growable substrate")

    def __eq__(self, other) -> bool:
        # compares persisted structure only (growth bookkeeping excluded)
        if not isinstance(other, MyceliumNetwork):
            return NotImplemented
        mine = {nid: (n.position, n.kind) for nid, n in self.nodes.items()}
        theirs = {nid: (n.position, n.kind) for nid, n in other.nodes.items()}
        return (
            self.seed == other.seed
            and mine == theirs
            and {sid: (s.a, s.b, s.state) for sid, s in self.strands.items()}
            == {sid: (s.a, s.b, s.state) for sid, s in other.strands.items()}
        )


def save_network(net: MyceliumNetwork, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_network(net))


def dump_network(net: MyceliumNetwork) -> str:
    lines = [NETWORK_FORMAT]
    if net.seed is not None:
        lines.append(f"seed {net.seed}")
    for nid in sorted(net.nodes):
        n = net.nodes[nid]
        coords = " ".join(repr(float(x)) for x in n.position)
        lines.append(f"node {nid} {coords} {n.kind}")
    for sid in sorted(net.strands):
        s = net.strands[sid]
        lines.append(f"strand {sid} {s.a} {s.b} {s.state}")
    return "\n".join(lines) + "\n"


def load_network(path) -> MyceliumNetwork:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_network(fh.read(), path=str(path))


def parse_network(text: str, path: str | None = None) -> MyceliumNetwork:
    """Parse the versioned text format; strand lengths are recomputed from positions."""
    lines = text.splitlines()
    if not lines or lines[0].strip() != NETWORK_FORMAT:
        raise ParseError(f"expected header {NETWORK_FORMAT!r}", path=path, line=1)
    net = MyceliumNetwork()
    nodes: dict[int, tuple[tuple[float, ...], str]] = {}
    strands: list[tuple[int, int, int, int, str]] = []
    for ln, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        if toks[0] == "seed":
            if len(toks) != 2 or net.seed is not None:
                raise ParseError("seed line needs: seed N, at most once", path=path, line=ln)
            try:
                net.seed = int(toks[1])
            except ValueError:
                raise ParseError(f"bad seed line {line!r}", path=path, line=ln) from None
        elif toks[0] == "node":
            if len(toks) not in (5, 6):
                raise ParseError("node line needs: node ID X Y [Z] KIND", path=path, line=ln)
            try:
                nid = int(toks[1])
                pos = tuple(float(t) for t in toks[2:-1])
            except ValueError:
                raise ParseError(f"bad node line {line!r}", path=path, line=ln) from None
            kind = toks[-1]
            if kind not in NODE_KINDS:
                raise ParseError(f"unknown node kind {kind!r}", path=path, line=ln)
            if nid in nodes:
                raise ParseError(f"duplicate node id {nid}", path=path, line=ln)
            nodes[nid] = (pos, kind)
        elif toks[0] == "strand":
            if len(toks) != 5:
                raise ParseError("strand line needs: strand ID A B STATE", path=path, line=ln)
            try:
                sid, a, b = int(toks[1]), int(toks[2]), int(toks[3])
            except ValueError:
                raise ParseError(f"bad strand line {line!r}", path=path, line=ln) from None
            state = toks[4]
            if state not in STRAND_STATES:
                raise ParseError(f"unknown strand state {state!r}", path=path, line=ln)
            strands.append((ln, sid, a, b, state))
        else:
            raise ParseError(f"unknown record {toks[0]!r}", path=path, line=ln)
    dims = {len(pos) for pos, _ in nodes.values()}
    if len(dims) > 1:
        raise ParseError(f"mixed position arities {sorted(dims)}", path=path)
    for nid in sorted(nodes):
        pos, kind = nodes[nid]
        node = Node(nid, pos, kind)
        net.nodes[nid] = node
        net._incident[nid] = []
    seen = set()
    for ln, sid, a, b, state in strands:
        if sid in seen:
            raise ParseError(f"duplicate strand id {sid}", path=path, line=ln)
        seen.add(sid)
        if a not in net.nodes or b not in net.nodes:
            raise ParseError(f"strand {sid} references missing node", path=path, line=ln)
        if a == b:
            raise ParseError(f"strand {sid} is a self-loop", path=path, line=ln)
        length = _distance(net.nodes[a].position, net.nodes[b].position)
        net.strands[sid] = Strand(sid, a, b, length, state)
        net._incident[a].append(sid)
        net._incident[b].append(sid)
    net._next_node_id = max(nodes, default=-1) + 1
    net._next_strand_id = max(seen, default=-1) + 1
    return net
