"""Spike detection and characterization for slow electrical recordings.

Pipeline per channel:

1. detrend: subtract a centered running median so multi-hour drift drops
   out while minutes-scale spikes survive. detect_spikes() refines this
   with a second pass that masks provisional excursions and re-estimates
   the median from spike-free samples only: wide spikes occupy enough of
   the window to drag the plain median upward, which clips amplitudes and
   narrows widths.
2. smooth: short boxcar average; sample noise otherwise splits excursions
   right at the hysteresis band and biases widths.
3. segment: a spike is a contiguous excursion of one polarity beyond half
   the trigger threshold that reaches the full threshold somewhere inside;
   nearby excursions merge across gaps shorter than merge_gap_s.
4. filter: drop excursions narrower than min_width_s or wider than
   max_width_s.

Amplitudes are peak magnitudes of the smoothed detrended signal; onsets are
the first sample of the excursion; widths are excursion durations.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .errors import ConfigError
from .recording import Recording, StimulusEvent


@dataclass(frozen=True)
class DetectorParams:
    baseline_window_s: float = 3600.0
    threshold_mv: float = 0.5
    min_width_s: float = 120.0
    max_width_s: float = 30_000.0
    merge_gap_s: float = 60.0
    smooth_window_s: float = 60.0
    train_split_gap_s: float = 3600.0
    train_boundary_s: float = 300.0
    wide_flag_s: float = 6000.0

    def __post_init__(self):
        if self.baseline_window_s <= 0:
            raise ConfigError("baseline_window_s must be > 0")
        if self.threshold_mv <= 0:
            raise ConfigError("threshold_mv must be > 0")
        if self.min_width_s < 0 or self.max_width_s <= self.min_width_s:
            raise ConfigError("need 0 <= min_width_s < max_width_s")
        if self.merge_gap_s < 0:
            raise ConfigError("merge_gap_s must be >= 0")
        if self.smooth_window_s < 0:
            raise ConfigError("smooth_window_s must be >= 0")
        if self.train_split_gap_s <= 0 or self.train_boundary_s <= 0:
            raise ConfigError("train parameters must be > 0")


@dataclass(frozen=True)
class DetectedSpike:
    channel: str
    onset_s: float
    peak_s: float
    amplitude_mv: float
    width_s: float

    def __post_init__(self):
        # numpy scalars repr as np.float64(...), which would poison CSV
        # output; normalize here so every writer sees plain floats
        for name in ("onset_s", "peak_s", "amplitude_mv", "width_s"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.amplitude_mv <= 0:
            raise ConfigError("amplitude_mv must be > 0")
        if not self.onset_s <= self.peak_s <= self.onset_s + self.width_s:
            raise ConfigError("peak must lie inside the spike extent")


def _rolling_median(x: np.ndarray, window: int) -> np.ndarray:
    # pandas uses a skiplist (O(n log w)); an O(n*w) filter would be far too
    # slow for day-long 1 Hz channels
    return (
        pd.Series(x).rolling(window, center=True, min_periods=1).median().to_numpy()
    )


def _rolling_mean(x: np.ndarray, window: int) -> np.ndarray:
    return pd.Series(x).rolling(window, center=True, min_periods=1).mean().to_numpy()


def detrend(recording: Recording, window_s: float = 3600.0) -> Recording:
    """Subtract a centered running median per channel; returns a new Recording."""
    window = int(round(window_s / recording.sample_interval_s))
    if window < 2:
        raise ConfigError(f"baseline window of {window_s} s is under 2 samples")
    if window > recording.n_samples:
        warnings.warn(
            "baseline window exceeds the recording; subtracting the global median",
            stacklevel=2,
        )
        baseline = np.median(recording.data, axis=1, keepdims=True)
        return recording.with_data(recording.data - baseline)
    rows = [recording.data[i] - _rolling_median(recording.data[i], window) for i in range(recording.n_channels)]
    return recording.with_data(np.vstack(rows))


def _smoothed(y: np.ndarray, smooth_n: int) -> np.ndarray:
    return _rolling_mean(y, smooth_n) if smooth_n >= 2 else y


def _padded_runs(s: np.ndarray, mask_level: float, smooth_n: int) -> list[tuple[int, int]]:
    """Excursion runs of |s| > mask_level, each padded by half its own length
    plus the boxcar width: the shoulders below mask_level scale with the
    excursion, and a bridge anchored on a shoulder rides above the baseline."""
    n = s.size
    idx = np.flatnonzero(np.abs(s) > mask_level)
    if not idx.size:
        return []
    breaks = np.flatnonzero(np.diff(idx) > 1)
    starts = np.concatenate(([idx[0]], idx[breaks + 1]))
    stops = np.concatenate((idx[breaks], [idx[-1]])) + 1
    mask = np.zeros(n, dtype=bool)
    for a, b in zip(starts, stops):
        pad = (b - a) // 2 + max(smooth_n, 1)
        mask[max(0, a - pad) : b + pad] = True
    rr = np.flatnonzero(mask)
    breaks = np.flatnonzero(np.diff(rr) > 1)
    run_starts = np.concatenate(([rr[0]], rr[breaks + 1]))
    run_stops = np.concatenate((rr[breaks], [rr[-1]])) + 1
    return list(zip(run_starts.tolist(), run_stops.tolist()))


def _masked_baseline(x: np.ndarray, runs: list[tuple[int, int]], window: int, anchor_n: int) -> np.ndarray:
    """Running median of x with the given index runs bridged out.

    Each hole is bridged with a straight line between robust anchors (the
    medians of the nearest clean samples on either side): a median window
    with a one-sided hole is time-asymmetric and biases the baseline
    wherever there is drift, while anchoring on a single sample would smear
    that sample's noise across the whole span.
    """
    n = x.size
    bridged = x.copy()
    for j, (a, b) in enumerate(runs):
        left_stop = runs[j - 1][1] if j else 0
        right_start = runs[j + 1][0] if j + 1 < len(runs) else n
        seg_l = x[max(left_stop, a - anchor_n) : a]
        seg_r = x[b : min(right_start, b + anchor_n)]
        if not seg_l.size or not seg_r.size:
            bridged[a:b] = np.nan  # touches a record edge; handled below
            continue
        t_l = a - 1 - (seg_l.size - 1) / 2.0
        t_r = b + (seg_r.size - 1) / 2.0
        v_l = float(np.median(seg_l))
        v_r = float(np.median(seg_r))
        bridged[a:b] = v_l + (v_r - v_l) * (np.arange(a, b) - t_l) / (t_r - t_l)
    # The centered median sees a shrinking one-sided window near the record
    # ends, which under drift biases the baseline there; extend both ends
    # along their local trend so every window stays full-width.
    valid = np.flatnonzero(~np.isnan(bridged))
    lo, hi = int(valid[0]), int(valid[-1])
    half = window // 2
    if hi > lo:
        seg = valid[valid < lo + window]
        slope, icpt = np.polyfit(seg, bridged[seg], 1)
        head = icpt + slope * np.arange(-half, lo)
        seg = valid[valid >= hi + 1 - window]
        slope, icpt = np.polyfit(seg, bridged[seg], 1)
        tail = icpt + slope * np.arange(hi + 1, n + half)
    else:
        head = np.full(half + lo, bridged[lo])
        tail = np.full(n + half - hi - 1, bridged[hi])
    ext = np.concatenate((head, bridged[lo : hi + 1], tail))
    return (
        pd.Series(ext)
        .rolling(window, center=True, min_periods=1)
        .median()
        .to_numpy()[half : half + n]
    )


def _refined_detrend(recording: Recording, params: DetectorParams) -> Recording:
    """Baseline removal with iterative excursion masking.

    A plain running median is dragged toward wide spikes (clipping their
    amplitudes) and, under steep drift, its bias between spikes can exceed
    the masking level, so a mask taken from a single provisional pass may
    blanket most of the record. Re-deriving the mask from each successive
    bridged baseline shakes out those occupancy artifacts; the mask settles
    onto the genuine excursions within a pass or two.
    """
    dt = recording.sample_interval_s
    n = recording.n_samples
    window = int(round(params.baseline_window_s / dt))
    if window < 2:
        raise ConfigError(f"baseline window of {params.baseline_window_s} s is under 2 samples")
    if window > n:
        warnings.warn(
            "baseline window exceeds the recording; subtracting the global median",
            stacklevel=2,
        )
        window = n
    smooth_n = int(round(params.smooth_window_s / dt))
    mask_level = params.threshold_mv / 4.0  # cover sub-band spike tails too
    anchor_n = max(smooth_n, 4)
    rows = []
    for i in range(recording.n_channels):
        x = recording.data[i]
        runs: list[tuple[int, int]] = []
        for _ in range(3):
            baseline = _masked_baseline(x, runs, window, anchor_n)
            new_runs = _padded_runs(_smoothed(x - baseline, smooth_n), mask_level, smooth_n)
            if new_runs == runs or new_runs == [(0, n)]:
                break  # settled, or nothing left to estimate a baseline from
            runs = new_runs
        else:
            baseline = _masked_baseline(x, runs, window, anchor_n)
        rows.append(x - baseline)
    return recording.with_data(np.vstack(rows))


def _excursions(y: np.ndarray, band: float, trigger: float) -> list[tuple[int, int]]:
    """Half-open index runs where y > band containing some sample >= trigger."""
    idx = np.flatnonzero(y > band)
    if idx.size == 0:
        return []
    breaks = np.flatnonzero(np.diff(idx) > 1)
    run_starts = [int(idx[0])] + [int(idx[b + 1]) for b in breaks]
    run_stops = [int(idx[b]) + 1 for b in breaks] + [int(idx[-1]) + 1]
    return [(a, b) for a, b in zip(run_starts, run_stops) if np.max(y[a:b]) >= trigger]


def detect_spikes(
    recording: Recording,
    params: DetectorParams | None = None,
    already_detrended: bool = False,
) -> list[DetectedSpike]:
    """Detect spikes on every channel; results ordered by (channel, onset)."""
    params = params or DetectorParams()
    rec = recording if already_detrended else _refined_detrend(recording, params)
    dt = rec.sample_interval_s
    smooth_n = int(round(params.smooth_window_s / dt))
    band = params.threshold_mv / 2.0
    out: list[DetectedSpike] = []
    for ch, label in enumerate(rec.labels):
        x = rec.data[ch]
        s = _rolling_mean(x, smooth_n) if smooth_n >= 2 else x
        runs = _excursions(s, band, params.threshold_mv) + _excursions(-s, band, params.threshold_mv)
        runs.sort()
        merged: list[list[int]] = []
        for a, b in runs:
            if merged and (a - merged[-1][1]) * dt < params.merge_gap_s:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        for a, b in merged:
            width = (b - a) * dt
            if not params.min_width_s <= width <= params.max_width_s:
                continue
            seg = np.abs(s[a:b])
            peak = a + int(np.argmax(seg))
            out.append(
                DetectedSpike(
                    channel=label,
                    onset_s=rec.start_s + a * dt,
                    peak_s=rec.start_s + peak * dt,
                    amplitude_mv=float(seg[peak - a]),
                    width_s=width,
                )
            )
    out.sort(key=lambda sp: (recording.labels.index(sp.channel), sp.onset_s))
    return out


@dataclass(frozen=True)
class SpikeStats:
    """Population statistics (sigma with N, not N-1); period fields are None
    when no channel has two spikes."""

    count: int
    amplitude_mean_mv: float
    amplitude_sigma_mv: float
    width_mean_s: float
    width_sigma_s: float
    period_mean_s: float | None
    period_sigma_s: float | None


def spike_stats(spikes) -> SpikeStats:
    """Summarize a spike list; periods are onset gaps within each channel."""
    spikes = list(spikes)
    if not spikes:
        return SpikeStats(0, 0.0, 0.0, 0.0, 0.0, None, None)
    amps = np.array([sp.amplitude_mv for sp in spikes])
    widths = np.array([sp.width_s for sp in spikes])
    periods: list[float] = []
    for label in sorted({sp.channel for sp in spikes}):
        onsets = sorted(sp.onset_s for sp in spikes if sp.channel == label)
        periods.extend(np.diff(onsets))
    if periods:
        period_mean, period_sigma = float(np.mean(periods)), float(np.std(periods))
    else:
        period_mean = period_sigma = None
    return SpikeStats(
        count=len(spikes),
        amplitude_mean_mv=float(np.mean(amps)),
        amplitude_sigma_mv=float(np.std(amps)),
        width_mean_s=float(np.mean(widths)),
        width_sigma_s=float(np.std(widths)),
        period_mean_s=period_mean,
        period_sigma_s=period_sigma,
    )


@dataclass(frozen=True)
class SpikeTrain:
    channel: str
    spikes: tuple[DetectedSpike, ...]
    period_mean_s: float
    rate_class: str  # high-frequency | low-frequency

    def __post_init__(self):
        if len(self.spikes) < 2:
            raise ConfigError("a train needs at least 2 spikes")


def classify_trains(spikes, params: DetectorParams | None = None) -> list[SpikeTrain]:
    """Split each channel's spikes into trains and class them by mean period.

    Consecutive onsets further apart than train_split_gap_s start a new
    train; isolated spikes are dropped. Mean period below train_boundary_s
    is high-frequency, at or above it low-frequency.
    """
    params = params or DetectorParams()
    by_channel: dict[str, list[DetectedSpike]] = {}
    for sp in spikes:
        by_channel.setdefault(sp.channel, []).append(sp)
    trains: list[SpikeTrain] = []
    for label in sorted(by_channel):
        chron = sorted(by_channel[label], key=lambda sp: sp.onset_s)
        run: list[DetectedSpike] = []
        for sp in chron:
            if run and sp.onset_s - run[-1].onset_s > params.train_split_gap_s:
                trains.extend(_finish_train(label, run, params))
                run = []
            run.append(sp)
        trains.extend(_finish_train(label, run, params))
    return trains


def _finish_train(label: str, run: list[DetectedSpike], params: DetectorParams) -> list[SpikeTrain]:
    if len(run) < 2:
        return []
    period = float(np.mean(np.diff([sp.onset_s for sp in run])))
    rate = "high-frequency" if period < params.train_boundary_s else "low-frequency"
    return [SpikeTrain(label, tuple(run), period, rate)]


@dataclass(frozen=True)
class StimulusLatency:
    stimulus: StimulusEvent
    channel: str
    latency_s: float


def stimulation_latency(
    recording: Recording,
    spikes,
    stimuli=None,
    max_latency_s: float = 7200.0,
) -> list[StimulusLatency]:
    """First post-stimulus spike onset per channel, within max_latency_s.

    Channels with no qualifying spike after a stimulus contribute no row, so
    an unresponsive recording yields an empty table.
    """
    stims = tuple(stimuli) if stimuli is not None else recording.stimuli
    rows: list[StimulusLatency] = []
    for stim in sorted(stims, key=lambda s: s.time_s):
        for label in recording.labels:
            onsets = sorted(
                sp.onset_s for sp in spikes if sp.channel == label and sp.onset_s > stim.time_s
            )
            if onsets and onsets[0] - stim.time_s <= max_latency_s:
                rows.append(StimulusLatency(stim, label, onsets[0] - stim.time_s))
    return rows
