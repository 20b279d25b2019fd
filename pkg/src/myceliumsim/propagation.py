"""Event-driven voltage spike propagation on a mycelium network.

Spikes travel along conductive strands at a fixed speed. Junction nodes
resolve near-coincident arrivals with a collision rule; tip and fruit-body
nodes are terminals: they log the arrival and absorb the spike. A strand
that has just carried a spike is refractory and rejects re-entry for a
fixed period.

Ordering semantics (these, not the data structures, define the model):

* Events are processed in ascending (time, kind, node id, spike id) order
  with departures (kind 0) ahead of arrivals (kind 1) at equal times. Every
  strand entry happens via a departure event, so refractory checks always
  see exactly the entries that precede them in time.
* An arrival at a junction anchors a collision group: all queued arrivals
  at the same node within the coincidence window tau of the anchor are
  absorbed into the group and resolved together. When tau is smaller than
  the fastest strand traversal time this greedy grouping is exact; for
  larger tau a spike created after the anchor was resolved can land inside
  a window it was not grouped with, so construction warns.
* Resolution: "annihilate" kills groups of two or more; "priority-pass"
  keeps the spike with the smallest (birth time, arrival time, via-strand
  id, spike id) and forwards it at its own arrival time; "fuse" forwards a
  single spike with the summed amplitude and earliest birth at the anchor
  time. Forwarded and lone spikes fan out onto every conductive incident
  strand except the ones the group arrived on.
* Refractory: a strand entered at time e rejects entries t with
  e < t < e + rho. Simultaneous entries share the strand.
"""

from __future__ import annotations

import csv
import heapq
import warnings
from dataclasses import dataclass
from typing import Iterator, NamedTuple

from .errors import (
    ChronologyError,
    ConfigError,
    MyceliumSimError,
    NotFoundError,
    ParseError,
    PortError,
)
from .network import TERMINAL_KINDS, MyceliumNetwork

COLLISION_RULES = ("annihilate", "priority-pass", "fuse")

_DEPART = 0
_ARRIVE = 1


@dataclass(frozen=True)
class SimConfig:
    """Propagation parameters; defaults match slow fungal electrical spikes."""

    speed_mm_s: float = 0.5
    collision_rule: str = "annihilate"
    window_s: float = 1.0
    refractory_s: float = 120.0
    horizon_s: float = 3600.0
    max_events: int = 5_000_000

    def __post_init__(self):
        if self.speed_mm_s <= 0:
            raise ConfigError("speed_mm_s must be > 0")
        if self.collision_rule not in COLLISION_RULES:
            raise ConfigError(f"collision_rule must be one of {COLLISION_RULES}, got {self.collision_rule!r}")
        if self.window_s < 0:
            raise ConfigError("window_s must be >= 0")
        if self.refractory_s < 0:
            raise ConfigError("refractory_s must be >= 0")
        if self.horizon_s <= 0:
            raise ConfigError("horizon_s must be > 0")
        if self.max_events < 1:
            raise ConfigError("max_events must be >= 1")


@dataclass
class Spike:
    """One traversal of one strand."""

    id: int
    strand_id: int
    toward: int  # node id the spike is moving toward
    depart_s: float
    arrive_s: float
    amplitude_mv: float
    birth_s: float  # injection time of the ancestral spike
    length_mm: float

    def position_mm_at(self, t: float) -> float:
        """Distance travelled along the strand at time t, clamped to [0, length]."""
        if t <= self.depart_s:
            return 0.0
        if t >= self.arrive_s:
            return self.length_mm
        return self.length_mm * (t - self.depart_s) / (self.arrive_s - self.depart_s)


class Arrival(NamedTuple):
    node_id: int
    time_s: float
    amplitude_mv: float
    spike_id: int


_ARRIVAL_HEADER = ["node_id", "arrival_s", "amplitude_mV", "spike_id"]


class ArrivalLog:
    """Immutable, chronologically sorted record of terminal arrivals."""

    def __init__(self, records):
        self.records: tuple[Arrival, ...] = tuple(
            sorted(records, key=lambda r: (r.time_s, r.node_id, r.spike_id))
        )

    def __iter__(self) -> Iterator[Arrival]:
        return iter(self.records)

    def __len__(self) -> int:
        return len(self.records)

    def __getitem__(self, index):
        return self.records[index]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ArrivalLog):
            return NotImplemented
        return self.records == other.records

    def __repr__(self) -> str:
        return f"ArrivalLog({len(self.records)} arrivals)"

    def at_node(self, node_id: int) -> tuple[Arrival, ...]:
        return tuple(r for r in self.records if r.node_id == node_id)

    def in_window(self, lo: float, hi: float, node_id: int | None = None) -> tuple[Arrival, ...]:
        """Arrivals with lo <= t <= hi, optionally restricted to one node."""
        return tuple(
            r
            for r in self.records
            if lo <= r.time_s <= hi and (node_id is None or r.node_id == node_id)
        )

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(_ARRIVAL_HEADER)
            for r in self.records:
                writer.writerow([r.node_id, repr(r.time_s), repr(r.amplitude_mv), r.spike_id])

    @classmethod
    def read_csv(cls, path) -> "ArrivalLog":
        records = []
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != _ARRIVAL_HEADER:
                raise ParseError(f"expected header {','.join(_ARRIVAL_HEADER)}", path=str(path), line=1)
            for ln, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != 4:
                    raise ParseError(f"expected 4 fields, got {len(row)}", path=str(path), line=ln)
                try:
                    records.append(Arrival(int(row[0]), float(row[1]), float(row[2]), int(row[3])))
                except ValueError:
                    raise ParseError(f"bad arrival row {row!r}", path=str(path), line=ln) from None
        return cls(records)


@dataclass
class ArrivalSummary:
    count: int
    first_s: float | None
    last_s: float | None
    per_node: dict[int, int]


def estimate_runtime_stats(log: ArrivalLog) -> ArrivalSummary:
    if not len(log):
        return ArrivalSummary(0, None, None, {})
    per_node: dict[int, int] = {}
    for r in log:
        per_node[r.node_id] = per_node.get(r.node_id, 0) + 1
    times = [r.time_s for r in log]
    return ArrivalSummary(len(log), min(times), max(times), dict(sorted(per_node.items())))


class SpikeSimulation:
    """Single-use simulation: construct, inject, run.

    The network is not copied; do not mutate it while the simulation lives.
    """

    def __init__(self, network: MyceliumNetwork, config: SimConfig | None = None):
        self.network = network
        self.config = config or SimConfig()
        self._conductive: dict[int, list[int]] = {
            nid: network.conductive_strands(nid) for nid in network.nodes
        }
        for s in network.strands.values():
            if s.conducts and s.length_mm <= 0:
                raise ConfigError(f"strand {s.id} has zero length; traversal time undefined")
        min_len = min(
            (s.length_mm for s in network.strands.values() if s.conducts), default=None
        )
        if (
            min_len is not None
            and self.config.window_s > 0
            and self.config.window_s >= min_len / self.config.speed_mm_s
        ):
            warnings.warn(
                "coincidence window is not shorter than the fastest strand traversal; "
                "greedy collision grouping may split late coincidences",
                stacklevel=2,
            )
        self._heap: list[tuple[float, int, int, int]] = []
        self.spikes: dict[int, Spike] = {}
        self._next_spike_id = 0
        self._ran = False

    # -- scheduling --------------------------------------------------------

    def _new_spike(self, strand_id: int, from_node: int, depart_s: float, amplitude: float, birth: float) -> Spike:
        strand = self.network.strands[strand_id]
        toward = strand.other(from_node)
        arrive = depart_s + strand.length_mm / self.config.speed_mm_s
        spike = Spike(
            self._next_spike_id, strand_id, toward, depart_s, arrive, amplitude, birth, strand.length_mm
        )
        self._next_spike_id += 1
        self.spikes[spike.id] = spike
        heapq.heappush(self._heap, (depart_s, _DEPART, from_node, spike.id))
        return spike

    def inject_spike(self, node_id: int, time_s: float, amplitude_mv: float = 1.0) -> list[Spike]:
        """Inject a voltage spike at a fruit body; returns the spikes created.

        One spike is created per conductive incident strand. An isolated
        node yields an empty list and schedules nothing.
        """
        if self._ran:
            raise ChronologyError("cannot inject after run()")
        if node_id not in self.network.nodes:
            raise NotFoundError(f"no node {node_id}")
        node = self.network.nodes[node_id]
        if node.kind != "fruit-body":
            raise PortError(f"node {node_id} is a {node.kind}; injections only at fruit-body nodes")
        if time_s < 0:
            raise ChronologyError(f"injection at t={time_s} is before the clock start")
        if amplitude_mv <= 0:
            raise ConfigError("amplitude_mv must be > 0")
        return [
            self._new_spike(sid, node_id, time_s, amplitude_mv, time_s)
            for sid in self._conductive[node_id]
        ]

    # -- engine ------------------------------------------------------------

    def run(self) -> ArrivalLog:
        """Process all events up to the horizon; returns the arrival log."""
        if self._ran:
            raise ChronologyError("simulation already ran")
        self._ran = True
        cfg = self.config
        heap = self._heap
        entries: dict[int, float] = {}  # strand id -> latest entry time
        log: list[Arrival] = []
        processed = 0
        while heap:
            time_s, kind, node_id, spike_id = heapq.heappop(heap)
            if time_s > cfg.horizon_s:
                break
            processed += 1
            if processed > cfg.max_events:
                raise MyceliumSimError(f"event budget exceeded ({cfg.max_events})")
            if kind == _DEPART:
                self._process_departure(spike_id, time_s, entries)
                continue
            spike = self.spikes[spike_id]
            node = self.network.nodes[node_id]
            if node.kind in TERMINAL_KINDS:
                log.append(Arrival(node_id, time_s, spike.amplitude_mv, spike_id))
                continue
            group = [spike]
            deadline = time_s + cfg.window_s
            stash = []
            while heap and heap[0][0] <= deadline:
                ev = heapq.heappop(heap)
                if ev[1] == _ARRIVE and ev[2] == node_id:
                    group.append(self.spikes[ev[3]])
                else:
                    stash.append(ev)
            for ev in stash:
                heapq.heappush(heap, ev)
            self._resolve(node_id, time_s, group)
        return ArrivalLog(log)

    def _process_departure(self, spike_id: int, time_s: float, entries: dict[int, float]) -> None:
        spike = self.spikes[spike_id]
        last = entries.get(spike.strand_id)
        if last is not None and last < time_s < last + self.config.refractory_s:
            return  # strand refractory: spike dies silently
        if last is None or time_s > last:
            entries[spike.strand_id] = time_s
        heapq.heappush(self._heap, (spike.arrive_s, _ARRIVE, spike.toward, spike_id))

    def _resolve(self, node_id: int, anchor_s: float, group: list[Spike]) -> None:
        """Apply the collision rule at a junction and fan survivors out."""
        group.sort(key=lambda sp: (sp.arrive_s, sp.id))
        vias = {sp.strand_id for sp in group}
        rule = self.config.collision_rule
        if len(group) == 1:
            survivors = [(group[0].arrive_s, group[0].amplitude_mv, group[0].birth_s)]
        elif rule == "annihilate":
            survivors = []
        elif rule == "priority-pass":
            winner = min(group, key=lambda sp: (sp.birth_s, sp.arrive_s, sp.strand_id, sp.id))
            survivors = [(winner.arrive_s, winner.amplitude_mv, winner.birth_s)]
        else:  # fuse
            survivors = [
                (anchor_s, sum(sp.amplitude_mv for sp in group), min(sp.birth_s for sp in group))
            ]
        for depart_s, amplitude, birth in survivors:
            for sid in self._conductive[node_id]:
                if sid not in vias:
                    self._new_spike(sid, node_id, depart_s, amplitude, birth)
