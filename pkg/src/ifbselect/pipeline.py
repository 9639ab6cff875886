"""Segment-averaged selector, frequency-domain filtering, squared envelope spectrum and ENVSI."""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.signal import hilbert

from .cmap import SelectorCurve, cm_selector, normalize_curve
from .corr import CorrMeasure
from .signal import Signal, as_signal
from .spectro import StftParams, spectrogram

log = logging.getLogger(__name__)

MIN_FAULT_CYCLES = 10


class ShortSegmentWarning(UserWarning):
    """A segment spans fewer fault cycles than recommended."""


@dataclass(frozen=True)
class PipelineConfig:
    segments: int = 1
    stft: StftParams = field(default_factory=StftParams)
    measure: CorrMeasure = field(default_factory=CorrMeasure)
    median_filter: bool = True
    fault_freq: float = 30.0
    harmonics: int = 10
    peak_tol: float = 2.0
    border: str = "zero"

    def __post_init__(self):
        if isinstance(self.measure, str):
            object.__setattr__(self, "measure", CorrMeasure(self.measure))
        if self.segments < 1:
            raise ValueError("segments must be >= 1")
        if self.harmonics < 1:
            raise ValueError("harmonics must be >= 1")
        if self.fault_freq <= 0:
            raise ValueError("fault_freq must be positive")

    @property
    def label(self) -> str:
        return f"{self.measure.kind}{'+mf' if self.median_filter else ''}"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["measure"] = asdict(self.measure)
        d["stft"] = asdict(self.stft)
        return d


@dataclass
class EnvsiReport:
    envsi_raw: float
    envsi_filtered: float | None
    score_pct: float | None
    harmonic_amps: list[float]
    harmonic_bins: list[int]
    p_bins: int
    degenerate: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def segment(signal: Signal, k: int, min_length: int = 1) -> list[Signal]:
    """Split into ``k`` contiguous pieces of ``N // k`` samples; the remainder is dropped."""
    if k < 1:
        raise ValueError("k must be >= 1")
    n = len(signal) // k
    if n < max(min_length, 1):
        raise ValueError(f"segments of {n} samples are shorter than the required {min_length}")
    x = signal.samples
    return [Signal(x[i * n : (i + 1) * n], signal.sample_rate) for i in range(k)]


def segment_selectors(signal, cfg: PipelineConfig, sample_rate=None, warn_short: bool = True) -> list[SelectorCurve]:
    sig = as_signal(signal, sample_rate)
    parts = segment(sig, cfg.segments, min_length=cfg.stft.window_len)
    cycles = parts[0].duration * cfg.fault_freq
    if warn_short and cycles < MIN_FAULT_CYCLES:
        warnings.warn(
            f"segments span {cycles:.1f} fault cycles (< {MIN_FAULT_CYCLES})",
            ShortSegmentWarning,
            stacklevel=2,
        )
    curves = []
    for part in parts:
        spec = spectrogram(part, cfg.stft)
        curve, _ = cm_selector(spec, cfg.measure, cfg.median_filter, cfg.border)
        curves.append(curve)
    return curves


def median_average(curves: list[SelectorCurve]) -> SelectorCurve:
    """Element-wise median of per-segment selectors, renormalized to a maximum of 1."""
    stacked = np.vstack([c.values for c in curves])
    return normalize_curve(np.median(stacked, axis=0), curves[0].freqs)


def averaged_selector(signal, cfg: PipelineConfig | None = None, sample_rate=None) -> SelectorCurve:
    cfg = cfg or PipelineConfig()
    return median_average(segment_selectors(signal, cfg, sample_rate))


def apply_filter(signal, curve: SelectorCurve, sample_rate=None) -> Signal:
    """Zero-phase filtering with ``curve`` as the amplitude response.

    The curve is linearly interpolated onto the FFT bins of the whole signal.
    """
    sig = as_signal(signal, sample_rate)
    n = len(sig)
    fs = sig.sample_rate
    if curve.freqs[0] > 0 or curve.freqs[-1] < fs / 2 * (1 - 1e-12):
        raise ValueError("selector must cover 0 .. fs/2")
    bins = np.fft.rfftfreq(n, 1.0 / fs)
    gain = np.interp(bins, curve.freqs, curve.values)
    y = np.fft.irfft(np.fft.rfft(sig.samples) * gain, n=n)
    return Signal(y, fs)


def ses(signal, sample_rate=None) -> tuple[np.ndarray, np.ndarray]:
    """Squared envelope spectrum: one-sided amplitude spectrum of the mean-removed squared envelope."""
    sig = as_signal(signal, sample_rate)
    x = sig.samples
    if x.size < 4:
        raise ValueError("ses needs at least 4 samples")
    env2 = np.abs(hilbert(x)) ** 2
    env2 -= env2.mean()
    amps = np.abs(np.fft.rfft(env2)) / x.size
    freqs = np.fft.rfftfreq(x.size, 1.0 / sig.sample_rate)
    return amps, freqs


def locate_harmonics(amps, freqs, fault_freq: float, m: int = 10, tol: float = 2.0):
    """Bin of the largest SES value within ``tol`` Hz of each of the first ``m`` harmonics.

    Ties resolve to the bin closest to the nominal harmonic frequency.
    """
    amps = np.asarray(amps, dtype=np.float64)
    freqs = np.asarray(freqs, dtype=np.float64)
    if m * fault_freq >= freqs[-1]:
        raise ValueError(f"{m} harmonics of {fault_freq} Hz exceed the SES range {freqs[-1]:.1f} Hz")
    bins = []
    for h in range(1, m + 1):
        target = h * fault_freq
        idx = np.flatnonzero(np.abs(freqs - target) <= tol + 1e-9 * target)
        if idx.size == 0:
            raise ValueError(f"no SES bin within {tol} Hz of harmonic {h} ({target} Hz)")
        window = amps[idx]
        best = idx[window == window.max()]
        bins.append(int(best[np.argmin(np.abs(freqs[best] - target))]))
    return np.asarray(bins)


def envsi(amps, freqs, fault_freq: float, m: int = 10, tol: float = 2.0) -> EnvsiReport:
    """Share of SES amplitude carried by the first ``m`` fault harmonics.

    Numerator: sum of the located harmonic amplitudes.  Denominator: sum of
    the SES from the first non-DC bin up to the bin of the ``m``-th harmonic.
    """
    amps = np.asarray(amps, dtype=np.float64)
    if 2 * tol >= fault_freq:
        raise ValueError("harmonic windows overlap; reduce tol")
    hb = locate_harmonics(amps, freqs, fault_freq, m, tol)
    p = int(hb[-1])
    # exactly rounded sums, so a spectrum with energy only at the harmonics scores exactly 1
    num = math.fsum(amps[hb])
    den = math.fsum(amps[1 : p + 1])
    value = num / den if den > 0 else 0.0
    return EnvsiReport(
        envsi_raw=value,
        envsi_filtered=None,
        score_pct=None,
        harmonic_amps=amps[hb].tolist(),
        harmonic_bins=hb.tolist(),
        p_bins=p,
    )


def envsi_value(signal, fault_freq: float, m: int = 10, tol: float = 2.0, sample_rate=None) -> float:
    amps, freqs = ses(signal, sample_rate)
    return envsi(amps, freqs, fault_freq, m, tol).envsi_raw


def envsi_score(filtered: float, raw: float) -> float:
    """Percentage change of ENVSI after filtering; NaN (with a warning) when ``raw`` is 0."""
    if raw == 0:
        warnings.warn("raw ENVSI is 0; score undefined", RuntimeWarning, stacklevel=2)
        return float("nan")
    return (filtered - raw) / raw * 100.0


@dataclass
class AnalysisResult:
    selector: SelectorCurve
    segment_selectors: list[SelectorCurve]
    filtered: Signal
    ses_raw: tuple[np.ndarray, np.ndarray]
    ses_filtered: tuple[np.ndarray, np.ndarray]
    report: EnvsiReport


def analyze(signal, cfg: PipelineConfig | None = None, sample_rate=None, selector: SelectorCurve | None = None) -> AnalysisResult:
    """Selector, filtered signal, both SES and the ENVSI report for one recording.

    ``selector`` overrides the correlation-map selector (e.g. a spectral-kurtosis
    baseline).  An all-zero selector leaves the signal unfiltered and marks the
    report degenerate.
    """
    cfg = cfg or PipelineConfig()
    sig = as_signal(signal, sample_rate)
    curves = [] if selector is not None else segment_selectors(sig, cfg)
    curve = selector if selector is not None else median_average(curves)
    degenerate = curve.empty
    filtered = sig if degenerate else apply_filter(sig, curve)
    if degenerate:
        log.warning("selector is all zero; reporting the unfiltered signal")
    raw_ses = ses(sig)
    filt_ses = ses(filtered)
    raw = envsi(*raw_ses, cfg.fault_freq, cfg.harmonics, cfg.peak_tol)
    filt = envsi(*filt_ses, cfg.fault_freq, cfg.harmonics, cfg.peak_tol)
    report = EnvsiReport(
        envsi_raw=raw.envsi_raw,
        envsi_filtered=filt.envsi_raw,
        score_pct=envsi_score(filt.envsi_raw, raw.envsi_raw) if raw.envsi_raw > 0 else None,
        harmonic_amps=filt.harmonic_amps,
        harmonic_bins=filt.harmonic_bins,
        p_bins=filt.p_bins,
        degenerate=degenerate,
    )
    return AnalysisResult(curve, curves, filtered, raw_ses, filt_ses, report)
