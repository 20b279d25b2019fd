"""Multi-channel voltage recordings and stimulus annotations.

Recordings are uniformly sampled, a few channels, values in millivolts
within the +-1250 mV logger range. CSV layout: header `time_s,<label>,...`
then one row per sample. Stimulus annotations live in a sidecar CSV
(`time_s,kind,duration_s`). Floats are serialized with repr() so
write/read round-trips are exact.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ParseError, RangeError

VOLTAGE_LIMIT_MV = 1250.0
_STIM_HEADER = ["time_s", "kind", "duration_s"]


@dataclass(frozen=True)
class StimulusEvent:
    time_s: float
    kind: str
    duration_s: float

    def __post_init__(self):
        # numpy scalars repr as np.float64(...), which would poison the
        # text round trip; normalize here so every writer sees plain floats
        object.__setattr__(self, "time_s", float(self.time_s))
        object.__setattr__(self, "duration_s", float(self.duration_s))
        if self.duration_s < 0:
            raise ConfigError("duration_s must be >= 0")


@dataclass(eq=False)
class Recording:
    """Channel-major sample matrix with uniform timebase."""

    labels: tuple[str, ...]
    sample_interval_s: float
    data: np.ndarray  # shape (n_channels, n_samples), mV
    start_s: float = 0.0
    stimuli: tuple[StimulusEvent, ...] = field(default_factory=tuple)

    def __post_init__(self):
        self.labels = tuple(str(x) for x in self.labels)
        self.data = np.atleast_2d(np.asarray(self.data, dtype=float))
        if self.sample_interval_s <= 0:
            raise ConfigError("sample_interval_s must be > 0")
        if len(self.labels) != self.data.shape[0]:
            raise ConfigError(f"{len(self.labels)} labels for {self.data.shape[0]} channels")
        if len(set(self.labels)) != len(self.labels):
            raise ConfigError("duplicate channel labels")
        if self.data.shape[1] < 1:
            raise ConfigError("recording needs at least one sample")
        peak = float(np.max(np.abs(self.data))) if self.data.size else 0.0
        if peak > VOLTAGE_LIMIT_MV:
            raise RangeError(f"samples reach {peak} mV, beyond the +-{VOLTAGE_LIMIT_MV} mV range")

    @property
    def n_channels(self) -> int:
        return self.data.shape[0]

    @property
    def n_samples(self) -> int:
        return self.data.shape[1]

    @property
    def duration_s(self) -> float:
        return (self.n_samples - 1) * self.sample_interval_s

    def times(self) -> np.ndarray:
        return self.start_s + np.arange(self.n_samples) * self.sample_interval_s

    def channel(self, label: str) -> np.ndarray:
        if label not in self.labels:
            raise ConfigError(f"no channel {label!r}; have {list(self.labels)}")
        return self.data[self.labels.index(label)]

    def with_data(self, data: np.ndarray) -> "Recording":
        return Recording(self.labels, self.sample_interval_s, data, self.start_s, self.stimuli)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Recording):
            return NotImplemented
        return (
            self.labels == other.labels
            and self.sample_interval_s == other.sample_interval_s
            and self.start_s == other.start_s
            and self.stimuli == other.stimuli
            and np.array_equal(self.data, other.data)
        )


def save_recording(recording: Recording, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time_s", *recording.labels])
        dt = recording.sample_interval_s
        for k in range(recording.n_samples):
            t = recording.start_s + k * dt
            writer.writerow([repr(t), *(repr(float(v)) for v in recording.data[:, k])])


def load_recording(path, stimulus_path=None) -> Recording:
    """Parse a recording CSV; raises ParseError with line diagnostics.

    Requires >= 2 rows (the timebase is inferred from the first two), a
    uniform timebase, and values within the logger range.
    """
    path = str(path)
    rows: list[tuple[float, list[float]]] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "time_s" or len(header) < 2:
            raise ParseError("expected header time_s,<channel>,...", path=path, line=1)
        labels = tuple(header[1:])
        width = len(header)
        for ln, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != width:
                raise ParseError(f"expected {width} fields, got {len(row)}", path=path, line=ln)
            try:
                t = float(row[0])
                values = [float(v) for v in row[1:]]
            except ValueError:
                raise ParseError(f"bad sample row {row!r}", path=path, line=ln) from None
            for v in values:
                if abs(v) > VOLTAGE_LIMIT_MV:
                    raise ParseError(
                        f"sample {v} mV outside the +-{VOLTAGE_LIMIT_MV} mV range", path=path, line=ln
                    )
            rows.append((t, values))
    if len(rows) < 2:
        raise ParseError("need at least 2 samples to establish the timebase", path=path)
    t0 = rows[0][0]
    dt = rows[1][0] - t0
    if dt <= 0:
        raise ParseError(f"non-increasing timebase (dt={dt})", path=path, line=3)
    for k, (t, _) in enumerate(rows):
        if abs(t - (t0 + k * dt)) > 1e-6 * max(1.0, abs(t)):
            raise ParseError(
                f"non-uniform timebase at t={t}, expected {t0 + k * dt}", path=path, line=2 + k
            )
    data = np.array([values for _, values in rows], dtype=float).T
    stimuli = load_stimuli(stimulus_path) if stimulus_path is not None else ()
    return Recording(labels, dt, data, start_s=t0, stimuli=stimuli)


def save_stimuli(stimuli, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_STIM_HEADER)
        for s in stimuli:
            writer.writerow([repr(s.time_s), s.kind, repr(s.duration_s)])


def load_stimuli(path) -> tuple[StimulusEvent, ...]:
    path = str(path)
    out = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != _STIM_HEADER:
            raise ParseError(f"expected header {','.join(_STIM_HEADER)}", path=path, line=1)
        for ln, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ParseError(f"expected 3 fields, got {len(row)}", path=path, line=ln)
            try:
                out.append(StimulusEvent(float(row[0]), row[1], float(row[2])))
            except (ValueError, ConfigError):
                raise ParseError(f"bad stimulus row {row!r}", path=path, line=ln) from None
    return tuple(out)
