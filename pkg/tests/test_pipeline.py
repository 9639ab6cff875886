import warnings

import numpy as np
import pytest

from ifbselect import (
    PipelineConfig,
    SelectorCurve,
    Signal,
    SimParams,
    analyze,
    apply_filter,
    averaged_selector,
    cm_selector,
    envsi,
    envsi_score,
    segment,
    ses,
    simulate,
    spectrogram,
)
from ifbselect.pipeline import ShortSegmentWarning, locate_harmonics, segment_selectors

FS = 25000.0


def tone(freq, n=25000, fs=FS, amp=1.0):
    return amp * np.cos(2 * np.pi * freq * np.arange(n) / fs)


def flat_curve(value, fs=FS, n=257):
    return SelectorCurve(np.full(n, float(value)), np.linspace(0, fs / 2, n))


# -- segmentation ------------------------------------------------------------


def test_segment_twelve_half_seconds():
    parts = segment(Signal(np.arange(150000.0), FS), 12)
    assert len(parts) == 12
    assert all(len(p) == 12500 and p.duration == 0.5 for p in parts)
    assert parts[1].samples[0] == 12500


def test_segment_single_and_floor_rule():
    x = Signal(np.arange(10.0), 1.0)
    assert segment(x, 1)[0] == x
    parts = segment(x, 3)
    assert [len(p) for p in parts] == [3, 3, 3]
    assert parts[2].samples[-1] == 8.0


def test_segment_errors():
    with pytest.raises(ValueError):
        segment(Signal(np.arange(10.0), 1.0), 0)
    with pytest.raises(ValueError):
        segment(Signal(np.arange(1000.0), 1.0), 4, min_length=256)


def test_averaged_selector_single_segment_equals_plain(default_sim):
    cfg = PipelineConfig(segments=1, measure="quadrant")
    plain, _ = cm_selector(spectrogram(default_sim.x), "quadrant")
    np.testing.assert_array_equal(averaged_selector(default_sim.x, cfg).values, plain.values)


def test_averaged_selector_identical_segments():
    base = simulate(SimParams(seed=11, duration=0.5)).x.samples
    x = Signal(np.tile(base, 3), FS)
    cfg = PipelineConfig(segments=3, measure="pearson")
    avg = averaged_selector(x, cfg)
    one, _ = cm_selector(spectrogram(Signal(base, FS)), "pearson")
    np.testing.assert_allclose(avg.values, one.values, atol=1e-12)


def test_short_segments_warn():
    with pytest.warns(ShortSegmentWarning):
        segment_selectors(simulate(SimParams(seed=0)).x, PipelineConfig(segments=4, measure="pearson"))


@pytest.mark.parametrize("measure", ["trimmed", "quadrant"])
def test_twelve_segment_selector_finds_band(measure):
    hits = 0
    for seed in range(10):
        x = simulate(SimParams(seed=seed, duration=6.0)).x
        hits += 2000 <= averaged_selector(x, PipelineConfig(segments=12, measure=measure)).peak_freq <= 3000
    assert hits >= 6


# -- filtering ---------------------------------------------------------------


def test_identity_filter(rng):
    x = Signal(rng.normal(size=4001), FS)
    y = apply_filter(x, flat_curve(1.0))
    np.testing.assert_allclose(y.samples, x.samples, rtol=1e-9, atol=1e-12)


def test_zero_filter(rng):
    y = apply_filter(Signal(rng.normal(size=4000), FS), flat_curve(0.0))
    assert np.all(y.samples == 0)


def test_brick_wall_attenuates_out_of_band_tone():
    x = Signal(tone(2500) + tone(6000), FS)
    freqs = np.linspace(0, FS / 2, 257)
    curve = SelectorCurve(((freqs >= 2000) & (freqs <= 3000)).astype(float), freqs)
    y = apply_filter(x, curve).samples
    spec = np.abs(np.fft.rfft(y))
    ref = np.abs(np.fft.rfft(x.samples))
    k6, k25 = 6000, 2500  # 1 Hz bins for 25000 samples at 25 kHz
    assert 20 * np.log10(spec[k6] / ref[k6]) < -60
    assert spec[k25] == pytest.approx(ref[k25], rel=1e-9)


def test_filter_needs_full_frequency_range():
    curve = SelectorCurve(np.ones(10), np.linspace(0, 5000, 10))
    with pytest.raises(ValueError):
        apply_filter(Signal(np.ones(100), FS), curve)


# -- squared envelope spectrum ---------------------------------------------------


def test_ses_of_pure_tone_is_flat():
    amps, freqs = ses(Signal(tone(2500, amp=2.0), FS))
    assert np.all(amps >= 0)
    assert freqs[1] == pytest.approx(1.0)
    assert amps[1:].max() < 4.0 * 10 ** (-80 / 20)


def test_ses_of_am_signal():
    t = np.arange(25000) / FS
    x = (1 + 0.5 * np.cos(2 * np.pi * 30 * t)) * np.cos(2 * np.pi * 2500 * t)
    amps, freqs = ses(Signal(x, FS))
    top = set(freqs[np.argsort(amps)[-2:]].round().astype(int))
    assert top == {30, 60}
    # envelope^2 = 1.125 + cos(w t) + 0.125 cos(2 w t); one-sided |rfft| / N halves each line
    assert amps[30] == pytest.approx(0.5, rel=1e-6)
    assert amps[60] == pytest.approx(0.0625, rel=1e-6)


# -- ENVSI -------------------------------------------------------------------


def test_envsi_harmonics_only():
    freqs = np.arange(1001.0)
    amps = np.zeros_like(freqs)
    amps[[30 * h for h in range(1, 11)]] = np.linspace(1, 2, 10)
    rep = envsi(amps, freqs, 30.0, 10, 2.0)
    assert rep.envsi_raw == 1.0
    assert rep.harmonic_bins == [30 * h for h in range(1, 11)]
    assert rep.p_bins == 300


def test_envsi_flat_spectrum():
    freqs = np.arange(1001.0)
    rep = envsi(np.ones_like(freqs), freqs, 30.0, 10, 0.0)
    assert rep.envsi_raw == pytest.approx(10 / 300, abs=1e-15)
    # ties inside a tolerance window resolve to the nominal harmonic bin
    assert envsi(np.ones_like(freqs), freqs, 30.0, 10, 2.0).envsi_raw == pytest.approx(10 / 300)


def test_locate_harmonics_picks_window_maximum():
    freqs = np.arange(500.0)
    amps = np.zeros(500)
    amps[31] = 5.0  # off by one bin from 30 Hz
    assert locate_harmonics(amps, freqs, 30.0, 3, 2.0)[0] == 31
    assert locate_harmonics(amps, freqs, 30.0, 3, 0.5)[0] == 30


def test_envsi_errors():
    freqs = np.arange(200.0)
    with pytest.raises(ValueError):
        envsi(np.ones(200), freqs, 30.0, 10, 2.0)  # 300 Hz beyond range
    with pytest.raises(ValueError):
        envsi(np.ones(200), freqs, 2.0, 5, 2.0)  # overlapping windows


@pytest.mark.parametrize("filtered,expected", [(0.2, 0.0), (0.4, 100.0), (0.1, -50.0)])
def test_envsi_score(filtered, expected):
    assert envsi_score(filtered, 0.2) == pytest.approx(expected)


def test_envsi_score_zero_raw():
    with pytest.warns(RuntimeWarning):
        assert np.isnan(envsi_score(0.1, 0.0))


# -- end to end --------------------------------------------------------------


def test_analyze_default_simulation(default_sim):
    res = analyze(default_sim.x, PipelineConfig(measure="quadrant"))
    r = res.report
    assert 0 <= r.envsi_raw <= 1 and 0 <= r.envsi_filtered <= 1
    assert r.score_pct == pytest.approx((r.envsi_filtered - r.envsi_raw) / r.envsi_raw * 100)
    assert len(r.harmonic_amps) == 10 and not r.degenerate
    assert res.selector.values.max() == 1.0
    assert len(res.filtered) == len(default_sim.x)


def test_analyze_with_empty_selector_is_degenerate(default_sim):
    empty = SelectorCurve(np.zeros(257), np.linspace(0, FS / 2, 257), empty=True)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = analyze(default_sim.x, PipelineConfig(), selector=empty)
    assert res.report.degenerate
    assert res.filtered == default_sim.x
    assert res.report.envsi_filtered == res.report.envsi_raw


def test_pipeline_config_validation():
    with pytest.raises(ValueError):
        PipelineConfig(segments=0)
    with pytest.raises(ValueError):
        PipelineConfig(fault_freq=-1)
    assert PipelineConfig(measure="kendall", median_filter=False).label == "kendall"
