"""Collision-based logic on mycelium networks.

A port assignment names fruit-body input nodes and one terminal output
node. Realizing a truth table runs one simulation per input vector (all set
inputs fire simultaneously at t=0) and reads bit i as "the output heard at
least one arrival inside the readout window". Bit j of vector index i
corresponds to inputs[j] via (i >> j) & 1.

brute_force_oracle() is an independent solver for small acyclic networks
used to cross-check the event engine: same semantics, separate
implementation (sorted worklists and linear scans, no event heap, no shared
code with SpikeSimulation).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .errors import (
    ArityError,
    ConfigError,
    MyceliumSimError,
    NotFoundError,
    PortError,
    UnsupportedNetworkError,
)
from .network import TERMINAL_KINDS, MyceliumNetwork
from .propagation import ArrivalLog, SimConfig, SpikeSimulation

MAX_INPUTS = 16
ORACLE_MAX_STRANDS = 50

_NAMED_BINARY = {
    (0, 0, 0, 0): "FALSE",
    (1, 1, 1, 1): "TRUE",
    (0, 0, 0, 1): "AND",
    (0, 1, 1, 1): "OR",
    (0, 1, 1, 0): "XOR",
    (1, 1, 1, 0): "NAND",
    (1, 0, 0, 0): "NOR",
    (1, 0, 0, 1): "XNOR",
}


@dataclass(frozen=True)
class PortAssignment:
    """Input fruit bodies, output terminal, injection amplitude, readout window."""

    inputs: tuple[int, ...]
    output: int
    amplitude_mv: float = 1.0
    window: tuple[float, float] = (0.0, 600.0)

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(int(i) for i in self.inputs))
        if len(set(self.inputs)) != len(self.inputs):
            raise PortError("duplicate input nodes")
        if self.output in self.inputs:
            raise PortError("output node cannot also be an input")
        if not self.inputs:
            raise PortError("need at least one input")
        if self.amplitude_mv <= 0:
            raise ConfigError("amplitude_mv must be > 0")
        lo, hi = self.window
        if not (0 <= lo <= hi):
            raise ConfigError(f"readout window {self.window} must satisfy 0 <= lo <= hi")

    def validate_against(self, network: MyceliumNetwork) -> None:
        if len(self.inputs) > MAX_INPUTS:
            raise ArityError(f"{len(self.inputs)} inputs; exhaustive enumeration capped at {MAX_INPUTS}")
        for nid in self.inputs:
            if nid not in network.nodes:
                raise NotFoundError(f"no node {nid}")
            kind = network.nodes[nid].kind
            if kind != "fruit-body":
                raise PortError(f"input node {nid} is a {kind}; inputs must be fruit-body nodes")
        if self.output not in network.nodes:
            raise NotFoundError(f"no node {self.output}")
        out_kind = network.nodes[self.output].kind
        if out_kind not in TERMINAL_KINDS:
            raise PortError(
                f"output node {self.output} is a {out_kind}; junctions never log arrivals, "
                "pick a tip or fruit-body node"
            )


@dataclass(frozen=True)
class TruthTable:
    n: int
    bits: tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) != 2**self.n:
            raise ConfigError(f"need {2**self.n} bits for {self.n} inputs, got {len(self.bits)}")
        if any(b not in (0, 1) for b in self.bits):
            raise ConfigError("table bits must be 0 or 1")

    def bitstring(self) -> str:
        return "".join(str(b) for b in self.bits)

    def canonical_index(self) -> int:
        return sum(b << i for i, b in enumerate(self.bits))

    def function_name(self) -> str:
        return classify_function(self)


@dataclass(frozen=True)
class TruthTableResult:
    table: TruthTable
    logs: tuple[ArrivalLog, ...]  # one per vector, vector index order
    output_reachable: bool


def classify_function(table: TruthTable) -> str:
    """Name the boolean function: constants, the eight binary classics, or other(hex)."""
    if all(b == 0 for b in table.bits):
        return "FALSE"
    if all(b == 1 for b in table.bits):
        return "TRUE"
    if table.n == 2:
        name = _NAMED_BINARY.get(table.bits)
        if name is not None:
            return name
    digits = max(1, 2**table.n // 4)
    return f"other(0x{table.canonical_index():0{digits}x})"


def _reachable_terminals(network: MyceliumNetwork, start: int) -> set[int]:
    """Terminal nodes a spike from `start` could reach: BFS over conductive
    strands that expands through junctions only (terminals absorb spikes)."""
    seen = {start}
    frontier = [start]
    found: set[int] = set()
    while frontier:
        nid = frontier.pop()
        for sid in network.conductive_strands(nid):
            other = network.strands[sid].other(nid)
            if other in seen:
                continue
            seen.add(other)
            if network.nodes[other].kind in TERMINAL_KINDS:
                found.add(other)
            else:
                frontier.append(other)
    return found


def realize_truth_table(
    network: MyceliumNetwork, assignment: PortAssignment, config: SimConfig | None = None
) -> TruthTableResult:
    """Enumerate all 2^n input vectors on the event engine."""
    config = config or SimConfig()
    assignment.validate_against(network)
    n = len(assignment.inputs)
    reachable = any(
        assignment.output in _reachable_terminals(network, nid) for nid in assignment.inputs
    )
    if not reachable:
        warnings.warn("output is unreachable from every input; table is identically 0", stacklevel=2)
        empty = ArrivalLog(())
        return TruthTableResult(TruthTable(n, (0,) * 2**n), tuple(empty for _ in range(2**n)), False)
    lo, hi = assignment.window
    bits = []
    logs = []
    for vector in range(2**n):
        sim = SpikeSimulation(network, config)
        for j, node_id in enumerate(assignment.inputs):
            if (vector >> j) & 1:
                sim.inject_spike(node_id, 0.0, assignment.amplitude_mv)
        log = sim.run()
        logs.append(log)
        bits.append(1 if log.in_window(lo, hi, assignment.output) else 0)
    return TruthTableResult(TruthTable(n, tuple(bits)), tuple(logs), True)


# -- geometry edits ----------------------------------------------------------


@dataclass(frozen=True)
class LengthenStrand:
    """Move the lower-degree endpoint along the strand axis to a new length."""

    strand_id: int
    new_length_mm: float


@dataclass(frozen=True)
class AbandonStrand:
    strand_id: int


@dataclass(frozen=True)
class AddStrand:
    a: int
    b: int


def apply_edit(network: MyceliumNetwork, edit) -> MyceliumNetwork:
    """Return an edited copy; the input network is untouched."""
    out = network.copy()
    if isinstance(edit, AbandonStrand):
        out.set_strand_state(edit.strand_id, "abandoned")
        return out
    if isinstance(edit, AddStrand):
        out.add_strand(edit.a, edit.b)
        return out
    if isinstance(edit, LengthenStrand):
        if edit.strand_id not in out.strands:
            raise NotFoundError(f"no strand {edit.strand_id}")
        if edit.new_length_mm <= 0:
            raise ConfigError("new_length_mm must be > 0")
        s = out.strands[edit.strand_id]
        # move the less-connected end so the rest of the geometry stays put
        moved, fixed = (s.a, s.b) if out.degree(s.a) < out.degree(s.b) else (s.b, s.a)
        fp = out.nodes[fixed].position
        mp = out.nodes[moved].position
        axis = [m - f for m, f in zip(mp, fp)]
        norm = sum(x * x for x in axis) ** 0.5
        if norm <= 0:
            raise ConfigError(f"strand {edit.strand_id} endpoints coincide; no axis to stretch along")
        out.move_node(moved, tuple(f + x / norm * edit.new_length_mm for f, x in zip(fp, axis)))
        return out
    raise ConfigError(f"unknown edit {edit!r}")


@dataclass(frozen=True)
class SweepEntry:
    edit: object | None  # None marks the unedited baseline
    table: TruthTable | None
    function: str | None
    changed: bool | None
    error: str | None


def geometry_sweep(
    network: MyceliumNetwork,
    edits,
    assignment: PortAssignment,
    config: SimConfig | None = None,
) -> list[SweepEntry]:
    """Realize the table for the base network and each edited variant.

    Per-edit failures are recorded in the entry instead of aborting the sweep.
    """
    base = realize_truth_table(network, assignment, config)
    entries = [SweepEntry(None, base.table, classify_function(base.table), False, None)]
    for edit in edits:
        try:
            variant = apply_edit(network, edit)
            result = realize_truth_table(variant, assignment, config)
            entries.append(
                SweepEntry(
                    edit,
                    result.table,
                    classify_function(result.table),
                    result.table != base.table,
                    None,
                )
            )
        except MyceliumSimError as exc:
            entries.append(SweepEntry(edit, None, None, None, str(exc)))
    return entries


# -- analytic oracle ---------------------------------------------------------


def _require_small_forest(network: MyceliumNetwork) -> None:
    strands = [s for s in network.strands.values() if s.conducts]
    if len(strands) > ORACLE_MAX_STRANDS:
        raise UnsupportedNetworkError(
            f"{len(strands)} conductive strands; analytic solving capped at {ORACLE_MAX_STRANDS}"
        )
    parent: dict[int, int] = {}

    def find(x: int) -> int:
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for s in strands:
        ra, rb = find(s.a), find(s.b)
        if ra == rb:
            raise UnsupportedNetworkError(
                f"conductive cycle through strand {s.id}; analytic solving needs an acyclic network"
            )
        parent[ra] = rb


def _analytic_vector(network: MyceliumNetwork, assignment: PortAssignment, config: SimConfig, vector: int) -> int:
    """One input vector solved by arrival-time arithmetic on a worklist.

    Record layout: [time, phase, node, seq, via_strand, amplitude, birth]
    with phase 0 = pending strand entry, 1 = pending junction/terminal
    arrival. seq numbers follow creation order, mirroring spike id order.
    """
    speed = config.speed_mm_s
    tau = config.window_s
    rho = config.refractory_s
    pending: list[list] = []
    seq = 0
    for j, node_id in enumerate(assignment.inputs):
        if not (vector >> j) & 1:
            continue
        for sid in network.conductive_strands(node_id):
            pending.append([0.0, 0, node_id, seq, sid, assignment.amplitude_mv, 0.0])
            seq += 1
    entries: dict[int, float] = {}
    hits: list[float] = []
    while pending:
        pending.sort(key=lambda r: (r[0], r[1], r[2], r[3]))
        rec = pending.pop(0)
        time_s, phase, node_id, _, via, amplitude, birth = rec
        if time_s > config.horizon_s:
            break
        if phase == 0:
            last = entries.get(via)
            if last is not None and last < time_s < last + rho:
                continue
            if last is None or time_s > last:
                entries[via] = time_s
            strand = network.strands[via]
            pending.append(
                [time_s + strand.length_mm / speed, 1, strand.other(node_id), seq, via, amplitude, birth]
            )
            seq += 1
            continue
        if network.nodes[node_id].kind in TERMINAL_KINDS:
            if node_id == assignment.output:
                hits.append(time_s)
            continue
        group = [rec]
        rest = []
        for other in pending:
            if other[1] == 1 and other[2] == node_id and other[0] <= time_s + tau:
                group.append(other)
            else:
                rest.append(other)
        pending = rest
        vias = {g[4] for g in group}
        if len(group) == 1:
            onward = [(group[0][0], group[0][5], group[0][6])]
        elif config.collision_rule == "annihilate":
            onward = []
        elif config.collision_rule == "priority-pass":
            best = min(group, key=lambda g: (g[6], g[0], g[4], g[3]))
            onward = [(best[0], best[5], best[6])]
        else:
            onward = [(time_s, sum(g[5] for g in group), min(g[6] for g in group))]
        for depart_s, amp, b in onward:
            for sid in network.conductive_strands(node_id):
                if sid in vias:
                    continue
                pending.append([depart_s, 0, node_id, seq, sid, amp, b])
                seq += 1
    lo, hi = assignment.window
    return 1 if any(lo <= t <= hi for t in hits) else 0


def brute_force_oracle(
    network: MyceliumNetwork, assignment: PortAssignment, config: SimConfig | None = None
) -> TruthTable:
    """Closed-form table for small acyclic networks; cross-checks the engine."""
    config = config or SimConfig()
    assignment.validate_against(network)
    _require_small_forest(network)
    n = len(assignment.inputs)
    bits = tuple(
        _analytic_vector(network, assignment, config, vector) for vector in range(2**n)
    )
    return TruthTable(n, bits)
