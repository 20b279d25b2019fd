import numpy as np
import pytest

from myceliumsim import (
    ConfigError,
    DetectedSpike,
    DetectorParams,
    Recording,
    StimulusEvent,
    classify_trains,
    detect_spikes,
    detrend,
    spike_stats,
    stimulation_latency,
)


def cosine_bump(t, t0, amp, support):
    """amp/2 * (1 - cos) pulse on [t0, t0+support]; crosses amp/4 at t0 + support/6."""
    u = (t - t0) / support
    y = np.zeros_like(t, dtype=float)
    inside = (u >= 0) & (u <= 1)
    y[inside] = amp * 0.5 * (1 - np.cos(2 * np.pi * u[inside]))
    return y


def one_channel(y, dt=1.0, label="e0", stimuli=()):
    return Recording((label,), dt, y, stimuli=stimuli)


def spike(channel, onset, amp=1.0, width=400.0):
    return DetectedSpike(channel, onset, onset + width / 2, amp, width)


# -- parameters ----------------------------------------------------------------


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(baseline_window_s=0.0),
        dict(threshold_mv=0.0),
        dict(min_width_s=-1.0),
        dict(max_width_s=100.0, min_width_s=100.0),
        dict(merge_gap_s=-1.0),
        dict(smooth_window_s=-1.0),
        dict(train_split_gap_s=0.0),
        dict(train_boundary_s=0.0),
    ],
)
def test_detector_params_validation(kwargs):
    with pytest.raises(ConfigError):
        DetectorParams(**kwargs)


def test_detected_spike_validation():
    with pytest.raises(ConfigError):
        DetectedSpike("e0", 0.0, 5.0, 0.0, 10.0)
    with pytest.raises(ConfigError):
        DetectedSpike("e0", 0.0, 20.0, 1.0, 10.0)


# -- detrending ----------------------------------------------------------------


def test_detrend_zeroes_a_constant():
    rec = one_channel(np.full(5000, 7.5))
    assert np.array_equal(detrend(rec).data, np.zeros((1, 5000)))


def test_detrend_flattens_day_scale_drift():
    t = np.arange(90_000, dtype=float)  # 25 h at 1 Hz
    rec = one_channel(5.0 * t / t[-1])
    flat = detrend(rec, 3600.0).data[0]
    assert np.ptp(flat) < 0.2


def test_spike_amplitude_survives_drift():
    t = np.arange(36_000, dtype=float)
    y = 5.0 * t / t[-1] + cosine_bump(t, 18_000.0, 1.0, 600.0)
    found = detect_spikes(one_channel(y))
    assert len(found) == 1
    assert found[0].amplitude_mv == pytest.approx(1.0, rel=0.05)


def test_detrend_window_under_two_samples():
    rec = one_channel(np.zeros(100), dt=10.0)
    with pytest.raises(ConfigError):
        detrend(rec, 12.0)


def test_detrend_window_beyond_record_warns():
    rec = one_channel(np.arange(100, dtype=float))
    with pytest.warns(UserWarning, match="global median"):
        flat = detrend(rec, 3600.0)
    assert np.array_equal(flat.data[0], rec.data[0] - np.median(rec.data[0]))


# -- detection -----------------------------------------------------------------


def test_flat_noise_yields_no_spikes():
    for seed in range(5):
        rng = np.random.default_rng(seed)
        t = np.arange(20_000, dtype=float)
        y = rng.normal(0.0, 0.05, t.size) + 2.0 * np.sin(2 * np.pi * t / 80_000)
        assert detect_spikes(one_channel(y)) == []


def test_clean_bump_measured_exactly():
    # amp 1, support 600 starting at 1000: the band (0.25 mV) is crossed
    # strictly above at samples 1101..1499, peak 1.0 at 1300
    t = np.arange(4000, dtype=float)
    y = cosine_bump(t, 1000.0, 1.0, 600.0)
    found = detect_spikes(one_channel(y), DetectorParams(smooth_window_s=0.0), already_detrended=True)
    assert len(found) == 1
    sp = found[0]
    assert sp.onset_s == 1101.0
    assert sp.width_s == 399.0
    assert sp.peak_s == 1300.0
    assert sp.amplitude_mv == pytest.approx(1.0, abs=1e-9)


def test_detection_invariant_to_dc_offset():
    t = np.arange(20_000, dtype=float)
    y = cosine_bump(t, 5_000.0, 1.2, 500.0) + cosine_bump(t, 12_000.0, 0.8, 700.0)
    base = detect_spikes(one_channel(y))
    assert len(base) == 2
    for offset in (-3.0, 3.0, 250.0):
        shifted = detect_spikes(one_channel(y + offset))
        assert [(sp.onset_s, sp.width_s, sp.peak_s) for sp in shifted] == [
            (sp.onset_s, sp.width_s, sp.peak_s) for sp in base
        ]
        for a, b in zip(shifted, base):
            assert a.amplitude_mv == pytest.approx(b.amplitude_mv, abs=1e-9)


def test_polarity_symmetry():
    t = np.arange(20_000, dtype=float)
    y = cosine_bump(t, 8_000.0, 1.0, 600.0)
    up = detect_spikes(one_channel(y))
    down = detect_spikes(one_channel(-y))
    assert up == down
    assert len(up) == 1


def test_merge_gap_is_strict():
    params = DetectorParams(smooth_window_s=0.0)
    t = np.arange(2000, dtype=float)
    # excursions [51,250) and [301,500): 51 s apart -> merged into one spike
    close = cosine_bump(t, 0.0, 1.0, 300.0) + cosine_bump(t, 250.0, 1.0, 300.0)
    merged = detect_spikes(one_channel(close), params, already_detrended=True)
    assert [sp.width_s for sp in merged] == [449.0]
    # excursions [51,250) and [310,509): exactly 60 s apart -> stays two
    apart = cosine_bump(t, 0.0, 1.0, 300.0) + cosine_bump(t, 259.0, 1.0, 300.0)
    two = detect_spikes(one_channel(apart), params, already_detrended=True)
    assert [sp.width_s for sp in two] == [199.0, 199.0]


def test_width_filters():
    t = np.arange(60_000, dtype=float)
    narrow = cosine_bump(t, 1000.0, 1.0, 150.0)  # 100 s above band < 120 s floor
    assert detect_spikes(one_channel(narrow), already_detrended=True) == []
    assert len(detect_spikes(one_channel(narrow), DetectorParams(min_width_s=60.0), already_detrended=True)) == 1

    block = np.zeros_like(t)
    block[10_000:45_000] = 1.0  # 35000 s above band > 30000 s ceiling
    assert detect_spikes(one_channel(block), already_detrended=True) == []
    assert len(detect_spikes(one_channel(block), DetectorParams(max_width_s=40_000.0), already_detrended=True)) == 1


def test_already_detrended_flag_is_honored():
    t = np.arange(36_000, dtype=float)
    y = 10.0 + cosine_bump(t, 18_000.0, 1.0, 600.0)
    # taken at face value the whole record is one 10-hour excursion
    assert detect_spikes(one_channel(y), already_detrended=True) == []
    assert len(detect_spikes(one_channel(y))) == 1


def test_channels_reported_in_order():
    t = np.arange(10_000, dtype=float)
    data = np.vstack(
        [
            cosine_bump(t, 6_000.0, 1.0, 500.0),
            cosine_bump(t, 2_000.0, 1.0, 500.0) + cosine_bump(t, 5_000.0, 1.0, 500.0),
        ]
    )
    rec = Recording(("z_late", "a_early"), 1.0, data)
    found = detect_spikes(rec, already_detrended=True)
    assert [sp.channel for sp in found] == ["z_late", "a_early", "a_early"]
    onsets = [sp.onset_s for sp in found if sp.channel == "a_early"]
    assert onsets == sorted(onsets)


def test_detector_agrees_with_naive_run_counter():
    """On clean, well-separated bumps the detector must match a dumb
    threshold-run scan of the raw trace."""

    def naive(y, band=0.25, trigger=0.5):
        above = np.flatnonzero(np.abs(y) > band)
        runs = np.split(above, np.flatnonzero(np.diff(above) > 1) + 1)
        return [r for r in runs if np.max(np.abs(y[r])) >= trigger]

    t = np.arange(20_000, dtype=float)
    for seed in range(5):
        rng = np.random.default_rng(seed)
        y = np.zeros_like(t)
        onsets = [2_000.0, 6_000.0, 10_000.0, 15_000.0]
        for t0 in onsets:
            y += cosine_bump(t, t0, rng.uniform(0.8, 1.5), rng.uniform(240.0, 600.0))
        expected = naive(y)
        found = detect_spikes(one_channel(y), already_detrended=True)
        assert len(found) == len(expected) == len(onsets)
        for sp, run in zip(found, expected):
            assert abs(sp.onset_s - run[0]) <= 32.0  # half the smoothing window
            # the 60 s boxcar shaves at most ~5% off the narrowest (240 s) bumps
            assert sp.amplitude_mv == pytest.approx(np.max(np.abs(y[run])), rel=0.06)


def test_noisy_drifting_record_end_to_end():
    rng = np.random.default_rng(11)
    t = np.arange(30_000, dtype=float)
    drift = 2.0 * np.sin(2 * np.pi * t / 50_000) + t * 1e-4
    y = drift + rng.normal(0.0, 0.05, t.size)
    onsets = [5_000.0, 13_000.0, 22_000.0]
    for t0 in onsets:
        y += cosine_bump(t, t0, 1.0, 600.0)
    found = detect_spikes(one_channel(y))
    assert len(found) == 3
    for sp, t0 in zip(found, onsets):
        assert sp.amplitude_mv == pytest.approx(1.0, rel=0.05)
        assert abs(sp.onset_s - (t0 + 100.0)) <= 6.0  # band crossing at t0 + support/6


# -- statistics ----------------------------------------------------------------


def test_spike_stats_exact_values():
    spikes = [
        DetectedSpike("e0", 0.0, 5.0, 1.0, 10.0),
        DetectedSpike("e0", 100.0, 105.0, 2.0, 10.0),
        DetectedSpike("e0", 300.0, 305.0, 3.0, 10.0),
    ]
    stats = spike_stats(spikes)
    assert stats.count == 3
    assert stats.amplitude_mean_mv == 2.0
    assert stats.amplitude_sigma_mv == 0.816496580927726  # population sigma
    assert stats.width_sigma_s == 0.0
    assert stats.period_mean_s == 150.0
    assert stats.period_sigma_s == 50.0


def test_spike_stats_pools_periods_within_channels_only():
    spikes = [
        spike("e0", 0.0),
        spike("e0", 100.0),
        spike("e1", 1_000_000.0),
        spike("e1", 1_000_300.0),
    ]
    assert spike_stats(spikes).period_mean_s == 200.0  # (100 + 300) / 2


def test_spike_stats_degenerate_inputs():
    empty = spike_stats([])
    assert empty.count == 0
    assert empty.amplitude_mean_mv == 0.0 and empty.amplitude_sigma_mv == 0.0
    assert empty.period_mean_s is None and empty.period_sigma_s is None

    single = spike_stats([spike("e0", 50.0, amp=0.9)])
    assert single.count == 1
    assert single.amplitude_mean_mv == 0.9
    assert single.amplitude_sigma_mv == 0.0
    assert single.period_mean_s is None


# -- trains --------------------------------------------------------------------


def test_short_period_train_classes_high_frequency():
    spikes = [spike("e0", k * 156.0, width=100.0) for k in range(5)]
    trains = classify_trains(spikes)
    assert len(trains) == 1
    tr = trains[0]
    assert tr.rate_class == "high-frequency"
    assert tr.period_mean_s == 156.0
    assert len(tr.spikes) == 5


def test_long_period_train_classes_low_frequency():
    spikes = [spike("e0", k * 840.0) for k in range(4)]
    assert [t.rate_class for t in classify_trains(spikes)] == ["low-frequency"]


def test_boundary_period_is_low_frequency():
    spikes = [spike("e0", k * 300.0) for k in range(3)]
    assert [t.rate_class for t in classify_trains(spikes)] == ["low-frequency"]


def test_mixed_recording_splits_into_two_trains():
    fast = [spike("e0", k * 156.0, width=100.0) for k in range(4)]
    slow = [spike("e0", 10_000.0 + k * 840.0) for k in range(3)]
    trains = classify_trains(fast + slow)
    assert [t.rate_class for t in trains] == ["high-frequency", "low-frequency"]
    assert [len(t.spikes) for t in trains] == [4, 3]


def test_isolated_spikes_are_dropped():
    assert classify_trains([spike("e0", 0.0)]) == []
    spikes = [spike("e0", 0.0), spike("e0", 20_000.0), spike("e0", 20_200.0)]
    trains = classify_trains(spikes)
    assert len(trains) == 1 and len(trains[0].spikes) == 2


def test_trains_keep_channels_separate():
    spikes = [spike("e0", 0.0), spike("e0", 200.0), spike("e1", 100.0), spike("e1", 700.0)]
    trains = classify_trains(spikes)
    assert [(t.channel, t.rate_class) for t in trains] == [
        ("e0", "high-frequency"),
        ("e1", "low-frequency"),
    ]


# -- stimulus latency ----------------------------------------------------------


def two_channel_stub(stimuli=()):
    return Recording(("near", "far"), 1.0, np.zeros((2, 10)), stimuli=stimuli)


def test_no_stimuli_no_rows():
    rec = two_channel_stub()
    assert stimulation_latency(rec, [spike("near", 100.0)]) == []


def test_latency_per_channel():
    rec = two_channel_stub(stimuli=(StimulusEvent(1000.0, "moist", 30.0),))
    spikes = [spike("near", 1120.0), spike("far", 1300.0)]
    rows = stimulation_latency(rec, spikes)
    assert [(r.channel, r.latency_s) for r in rows] == [("near", 120.0), ("far", 300.0)]


def test_spike_at_stimulus_instant_does_not_count():
    rec = two_channel_stub(stimuli=(StimulusEvent(1000.0, "moist", 0.0),))
    assert stimulation_latency(rec, [spike("near", 1000.0)]) == []


def test_latency_ceiling_is_inclusive():
    rec = two_channel_stub(stimuli=(StimulusEvent(0.0, "moist", 0.0),))
    assert len(stimulation_latency(rec, [spike("near", 7200.0)])) == 1
    assert stimulation_latency(rec, [spike("near", 7200.5)]) == []


def test_each_stimulus_gets_its_own_row():
    rec = two_channel_stub(
        stimuli=(StimulusEvent(5000.0, "mechanical", 1.0), StimulusEvent(1000.0, "moist", 30.0))
    )
    spikes = [spike("near", 1500.0), spike("near", 5600.0)]
    rows = stimulation_latency(rec, spikes)
    assert [(r.stimulus.kind, r.latency_s) for r in rows] == [("moist", 500.0), ("mechanical", 600.0)]


def test_explicit_stimuli_override_recording():
    rec = two_channel_stub(stimuli=(StimulusEvent(1000.0, "moist", 30.0),))
    rows = stimulation_latency(rec, [spike("near", 2000.0)], stimuli=[StimulusEvent(1900.0, "cold", 0.0)])
    assert [(r.stimulus.kind, r.latency_s) for r in rows] == [("cold", 100.0)]
