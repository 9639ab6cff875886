"""scikit-learn style wrappers.

A selector is *fitted* on a recording (learning the band-selection curve)
and *transforms* recordings by filtering them with that curve::

    sel = CorrelationMapSelector(sample_rate=25_000, measure="quadrant")
    filtered = sel.fit_transform(x)
    sel.selector_          # per-bin gain in [0, 1]
    sel.score(x)           # ENVSI of the filtered signal (needs fault_freq)
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_fraction, check_positive_int, check_sample_rate, check_signal
from .baselines import spectral_kurtosis
from .cmap import SelectorCurve
from .corr import CorrMeasure
from .pipeline import PipelineConfig, apply_filter, envsi_value, median_average, segment_selectors
from .signal import Signal
from .spectro import StftParams, spectrogram


class _SelectorMixin(TransformerMixin, BaseEstimator):
    def _stft_params(self) -> StftParams:
        return StftParams(int(self.window_len), int(self.overlap), int(self.nfft))

    def _signal(self, X) -> Signal:
        fs = check_sample_rate(self.sample_rate)
        return Signal(check_signal(X, name="X", min_length=int(self.window_len)), fs)

    @property
    def curve_(self) -> SelectorCurve:
        check_is_fitted(self, "selector_")
        return SelectorCurve(self.selector_, self.freqs_, empty=bool(self.empty_))

    def transform(self, X):
        """Filter ``X`` with the fitted selector (zero phase)."""
        check_is_fitted(self, "selector_")
        sig = self._signal(X)
        if self.empty_:
            return sig.samples.copy()
        return apply_filter(sig, self.curve_).samples

    def score(self, X, y=None) -> float:
        """ENVSI of the filtered signal; requires ``fault_freq``."""
        if self.fault_freq is None:
            raise ValueError("set fault_freq to score a selector")
        filtered = self.transform(X)
        return envsi_value(filtered, self.fault_freq, self.harmonics, self.peak_tol, sample_rate=self.sample_rate)


class CorrelationMapSelector(_SelectorMixin):
    """Band selector from a robust correlation map of the spectrogram.

    Parameters
    ----------
    sample_rate : float
    measure : {"trimmed", "quadrant", "kendall", "pearson"}
    trim_c : float
        Trimming fraction for the trimmed estimator.
    trim_mode : {"zero", "delete"}
    segments : int
        Number of segments whose selectors are median-averaged.
    median_filter : bool
        Apply the 3x3 median filter to the enhanced map.
    border : {"zero", "replicate"}
    window_len, overlap, nfft : int
        STFT parameters.
    fault_freq : float or None
        Only needed by :meth:`score`.
    harmonics, peak_tol
        ENVSI settings used by :meth:`score`.
    """

    def __init__(
        self,
        sample_rate=25_000.0,
        measure="trimmed",
        trim_c=0.03,
        trim_mode="zero",
        segments=1,
        median_filter=True,
        border="zero",
        window_len=256,
        overlap=217,
        nfft=512,
        fault_freq=None,
        harmonics=10,
        peak_tol=2.0,
    ):
        self.sample_rate = sample_rate
        self.measure = measure
        self.trim_c = trim_c
        self.trim_mode = trim_mode
        self.segments = segments
        self.median_filter = median_filter
        self.border = border
        self.window_len = window_len
        self.overlap = overlap
        self.nfft = nfft
        self.fault_freq = fault_freq
        self.harmonics = harmonics
        self.peak_tol = peak_tol

    def _config(self) -> PipelineConfig:
        check_fraction(self.trim_c, "trim_c")
        return PipelineConfig(
            segments=check_positive_int(self.segments, "segments"),
            stft=self._stft_params(),
            measure=CorrMeasure(self.measure, self.trim_c, self.trim_mode),
            median_filter=bool(self.median_filter),
            fault_freq=self.fault_freq or 1.0,
            harmonics=self.harmonics,
            peak_tol=self.peak_tol,
            border=self.border,
        )

    def fit(self, X, y=None):
        cfg = self._config()
        curves = segment_selectors(self._signal(X), cfg, warn_short=self.fault_freq is not None)
        curve = median_average(curves)
        self.selector_ = curve.values
        self.freqs_ = curve.freqs
        self.empty_ = curve.empty
        self.segment_selectors_ = np.vstack([c.values for c in curves])
        return self


class SpectralKurtosisSelector(_SelectorMixin):
    """Baseline selector: normalized excess kurtosis of each spectrogram row."""

    def __init__(self, sample_rate=25_000.0, window_len=256, overlap=217, nfft=512,
                 fault_freq=None, harmonics=10, peak_tol=2.0):
        self.sample_rate = sample_rate
        self.window_len = window_len
        self.overlap = overlap
        self.nfft = nfft
        self.fault_freq = fault_freq
        self.harmonics = harmonics
        self.peak_tol = peak_tol

    def fit(self, X, y=None):
        curve = spectral_kurtosis(spectrogram(self._signal(X), self._stft_params()))
        self.selector_ = curve.values
        self.freqs_ = curve.freqs
        self.empty_ = curve.empty
        return self
