"""Informative frequency band selection with robust spectrogram correlation maps."""

__version__ = "0.1.0"

from .baselines import spectral_kurtosis
from .cmap import CorrelationMap, SelectorCurve, aggregate, build_cm, cm_selector, enhance_cm, median_filter_2d
from .corr import CorrMeasure, DegenerateCorrelationWarning, corr_matrix, kcc, pcc, qcc, tcc
from .estimators import CorrelationMapSelector, SpectralKurtosisSelector
from .pipeline import (
    EnvsiReport,
    PipelineConfig,
    analyze,
    apply_filter,
    averaged_selector,
    envsi,
    envsi_score,
    segment,
    ses,
)
from .signal import Signal
from .simulate import SimParams, SimulatedSignal, gauss_pulse, simulate
from .spectro import Spectrogram, StftParams, hamming, spectrogram, stft

__all__ = [
    "CorrMeasure",
    "CorrelationMap",
    "CorrelationMapSelector",
    "DegenerateCorrelationWarning",
    "EnvsiReport",
    "PipelineConfig",
    "SelectorCurve",
    "Signal",
    "SimParams",
    "SimulatedSignal",
    "SpectralKurtosisSelector",
    "Spectrogram",
    "StftParams",
    "aggregate",
    "analyze",
    "apply_filter",
    "averaged_selector",
    "build_cm",
    "cm_selector",
    "corr_matrix",
    "enhance_cm",
    "envsi",
    "envsi_score",
    "gauss_pulse",
    "hamming",
    "kcc",
    "median_filter_2d",
    "pcc",
    "qcc",
    "segment",
    "ses",
    "simulate",
    "spectral_kurtosis",
    "spectrogram",
    "stft",
    "tcc",
]
