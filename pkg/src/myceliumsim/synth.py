"""Statistics-matched synthetic recordings with known ground truth.

Each channel renders raised-cosine spikes on a linear drift plus white
noise. Spike parameters (amplitude, width, period) are drawn per channel
and then affinely standardized so the sample mean and population sigma hit
the requested values exactly; the point of these recordings is to carry a
known population, not merely to approximate one.

Width convention: a spec width is the duration the spike spends above
width_ref_level_mv, which is what a threshold detector measures. The
raised-cosine support is derived from it per amplitude:
support = width * pi / arccos(2 * level / amplitude - 1).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields

import numpy as np

from .errors import ConfigError, InfeasibleSpecError, ParseError
from .detection import DetectedSpike
from .recording import Recording


@dataclass(frozen=True)
class SynthChannelSpec:
    spike_count: int
    amplitude_mean_mv: float
    amplitude_sigma_mv: float = 0.0
    width_mean_s: float = 1020.0
    width_sigma_s: float = 0.0
    period_mean_s: float = 3600.0
    period_sigma_s: float = 0.0
    drift_mv_per_h: float = 0.0
    noise_sigma_mv: float = 0.0
    amplitude_floor_mv: float = 0.65
    width_floor_s: float = 240.0
    min_gap_s: float = 120.0
    width_ref_level_mv: float = 0.25

    def __post_init__(self):
        if self.spike_count < 0:
            raise ConfigError("spike_count must be >= 0")
        if self.spike_count > 0:
            if self.amplitude_mean_mv <= 0 or self.width_mean_s <= 0 or self.period_mean_s <= 0:
                raise ConfigError("amplitude, width and period means must be > 0")
        for name in ("amplitude_sigma_mv", "width_sigma_s", "period_sigma_s", "noise_sigma_mv"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        if not 0 < self.width_ref_level_mv < self.amplitude_floor_mv:
            raise ConfigError("need 0 < width_ref_level_mv < amplitude_floor_mv")
        if self.width_floor_s <= 0 or self.min_gap_s < 0:
            raise ConfigError("width_floor_s must be > 0 and min_gap_s >= 0")


@dataclass(frozen=True)
class SynthSpec:
    duration_s: float
    channels: dict[str, SynthChannelSpec] = field(default_factory=dict)
    sample_interval_s: float = 1.0
    edge_margin_s: float = 900.0

    def __post_init__(self):
        if self.duration_s <= 0:
            raise ConfigError("duration_s must be > 0")
        if self.sample_interval_s <= 0:
            raise ConfigError("sample_interval_s must be > 0")
        if not self.channels:
            raise ConfigError("spec needs at least one channel")
        if self.edge_margin_s < 0:
            raise ConfigError("edge_margin_s must be >= 0")


def _standardized(draws: np.ndarray, mean: float, sigma: float) -> np.ndarray:
    """Affinely map draws to exact sample mean and population sigma."""
    if draws.size == 0:
        return draws
    spread = float(np.std(draws))
    if draws.size == 1 or sigma == 0.0 or spread == 0.0:
        return np.full(draws.shape, mean)
    return mean + (draws - float(np.mean(draws))) * (sigma / spread)


def _support_s(width_s: float, amplitude_mv: float, level_mv: float) -> float:
    # duration above `level` of a raised cosine of this amplitude
    return width_s * math.pi / math.acos(2.0 * level_mv / amplitude_mv - 1.0)


def generate_synthetic(spec: SynthSpec, seed: int) -> tuple[Recording, list[DetectedSpike]]:
    """Render the spec; returns the recording and its ground-truth spike list.

    Ground-truth onset/width use the width_ref_level_mv crossing convention;
    peak time is the bump center. Raises InfeasibleSpecError when the spikes
    cannot fit in the duration with the requested spacing.
    """
    rng = np.random.default_rng(seed)
    n = max(2, int(round(spec.duration_s / spec.sample_interval_s)))
    dt = spec.sample_interval_s
    t = np.arange(n) * dt
    rows = []
    truth: list[DetectedSpike] = []
    for label, ch in spec.channels.items():
        amps = np.maximum(
            _standardized(rng.standard_normal(ch.spike_count), ch.amplitude_mean_mv, ch.amplitude_sigma_mv),
            ch.amplitude_floor_mv,
        )
        widths = np.maximum(
            _standardized(rng.standard_normal(ch.spike_count), ch.width_mean_s, ch.width_sigma_s),
            ch.width_floor_s,
        )
        # the first spike sits at the edge margin; "period" describes the
        # count-1 onset-to-onset gaps, so that is what gets standardized
        gaps = _standardized(
            rng.standard_normal(max(0, ch.spike_count - 1)), ch.period_mean_s, ch.period_sigma_s
        )
        supports = np.array(
            [_support_s(w, a, ch.width_ref_level_mv) for w, a in zip(widths, amps)]
        )
        centers = np.empty(ch.spike_count)
        for k in range(ch.spike_count):
            if k == 0:
                centers[0] = spec.edge_margin_s + supports[0] / 2.0
            else:
                gap_floor = (supports[k - 1] + supports[k]) / 2.0 + ch.min_gap_s
                centers[k] = centers[k - 1] + max(gaps[k - 1], gap_floor)
        if ch.spike_count and centers[-1] + supports[-1] / 2.0 + spec.edge_margin_s > spec.duration_s:
            raise InfeasibleSpecError(
                f"channel {label!r}: {ch.spike_count} spikes need "
                f"{centers[-1] + supports[-1] / 2.0 + spec.edge_margin_s:.0f} s, "
                f"duration is {spec.duration_s:.0f} s"
            )
        x = ch.drift_mv_per_h * (t / 3600.0)
        for amp, width, support, center in zip(amps, widths, supports, centers):
            i0 = max(0, int(math.ceil((center - support / 2.0) / dt)))
            i1 = min(n - 1, int(math.floor((center + support / 2.0) / dt)))
            seg = t[i0 : i1 + 1]
            x[i0 : i1 + 1] += amp / 2.0 * (1.0 + np.cos(2.0 * math.pi * (seg - center) / support))
            truth.append(
                DetectedSpike(
                    channel=label,
                    onset_s=center - width / 2.0,
                    peak_s=center,
                    amplitude_mv=float(amp),
                    width_s=float(width),
                )
            )
        if ch.noise_sigma_mv > 0:
            x = x + ch.noise_sigma_mv * rng.standard_normal(n)
        rows.append(x)
    recording = Recording(tuple(spec.channels), dt, np.vstack(rows))
    return recording, truth


def load_synth_spec(path) -> SynthSpec:
    """Read a JSON spec: {"duration_s": ..., "channels": {label: {...}}}."""
    path = str(path)
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad JSON: {exc}", path=path) from exc
    if not isinstance(doc, dict):
        raise ParseError("spec must be a JSON object", path=path)
    known_top = {"duration_s", "sample_interval_s", "edge_margin_s", "channels"}
    unknown = set(doc) - known_top
    if unknown:
        raise ParseError(f"unknown spec keys {sorted(unknown)}", path=path)
    channels_doc = doc.get("channels")
    if not isinstance(channels_doc, dict) or not channels_doc:
        raise ParseError("spec needs a non-empty channels object", path=path)
    channel_fields = {f.name for f in fields(SynthChannelSpec)}
    channels = {}
    for label, body in channels_doc.items():
        if not isinstance(body, dict):
            raise ParseError(f"channel {label!r} must be an object", path=path)
        unknown = set(body) - channel_fields
        if unknown:
            raise ParseError(f"channel {label!r}: unknown keys {sorted(unknown)}", path=path)
        try:
            channels[label] = SynthChannelSpec(**body)
        except (TypeError, ConfigError) as exc:
            raise ParseError(f"channel {label!r}: {exc}", path=path) from exc
    try:
        return SynthSpec(
            duration_s=doc.get("duration_s", 0.0),
            channels=channels,
            sample_interval_s=doc.get("sample_interval_s", 1.0),
            edge_margin_s=doc.get("edge_margin_s", 900.0),
        )
    except ConfigError as exc:
        raise ParseError(str(exc), path=path) from exc
