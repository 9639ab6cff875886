"""Correlation maps between spectrogram rows and their reduction to a band selector.

The chain is ``build_cm -> enhance_cm -> median_filter_2d -> aggregate``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy import ndimage

from .corr import CorrMeasure, corr_matrix
from .spectro import Spectrogram

STAGES = ("raw", "enhanced", "median_filtered")
BORDERS = {"zero": "constant", "replicate": "nearest"}


@dataclass(frozen=True, eq=False)
class CorrelationMap:
    values: np.ndarray  # (F, F), symmetric
    freqs: np.ndarray
    measure: CorrMeasure
    stage: str = "raw"
    degenerate_rows: np.ndarray | None = None
    threshold: float | None = None  # Q3 used by enhance_cm

    def __post_init__(self):
        if self.stage not in STAGES:
            raise ValueError(f"stage must be one of {STAGES}")


@dataclass(frozen=True, eq=False)
class SelectorCurve:
    values: np.ndarray
    freqs: np.ndarray
    empty: bool = False

    def __post_init__(self):
        if self.values.shape != self.freqs.shape:
            raise ValueError("values and freqs must have the same length")

    @property
    def peak_freq(self) -> float:
        return float(self.freqs[np.argmax(self.values)])


def build_cm(spec: Spectrogram, measure: CorrMeasure | str = "trimmed") -> CorrelationMap:
    """Correlation of every pair of spectrogram rows (frequency-bin subsignals)."""
    if isinstance(measure, str):
        measure = CorrMeasure(measure)
    if spec.mag.shape[1] < 2:
        raise ValueError("spectrogram needs at least two time frames")
    values = corr_matrix(spec.mag, measure)
    return CorrelationMap(
        values=values,
        freqs=spec.freqs,
        measure=measure,
        stage="raw",
        degenerate_rows=np.flatnonzero(np.ptp(spec.mag, axis=1) == 0),
    )


def enhance_cm(cm: CorrelationMap) -> CorrelationMap:
    """Zero the diagonal, negative entries, and entries below the third quartile.

    The quartile (linear interpolation between order statistics) is taken over
    the strictly upper off-diagonal triangle of the raw map.
    """
    if cm.stage != "raw":
        raise ValueError(f"enhance_cm expects a raw map, got stage {cm.stage!r}")
    v = cm.values
    iu = np.triu_indices_from(v, k=1)
    q3 = float(np.percentile(v[iu], 75)) if iu[0].size else 0.0
    out = np.where((v >= q3) & (v > 0), v, 0.0)
    np.fill_diagonal(out, 0.0)
    return replace(cm, values=out, stage="enhanced", threshold=q3)


def median_filter_2d(cm: CorrelationMap, border: str = "zero") -> CorrelationMap:
    """3x3 median filter; ``border`` is ``"zero"`` (pad with 0) or ``"replicate"``."""
    if border not in BORDERS:
        raise ValueError(f"border must be one of {tuple(BORDERS)}")
    if cm.stage == "median_filtered":
        raise ValueError("map is already median filtered")
    out = ndimage.median_filter(cm.values, size=3, mode=BORDERS[border], cval=0.0)
    out = 0.5 * (out + out.T)
    return replace(cm, values=out, stage="median_filtered")


def aggregate(cm: CorrelationMap) -> SelectorCurve:
    """Column-wise mean of the strictly positive entries, normalized to a maximum of 1."""
    if cm.stage == "raw":
        raise ValueError("aggregate expects an enhanced or median-filtered map")
    v = cm.values
    pos = v > 0
    count = pos.sum(axis=0)
    sums = np.where(pos, v, 0.0).sum(axis=0)
    curve = np.divide(sums, count, out=np.zeros_like(sums), where=count > 0)
    return normalize_curve(curve, cm.freqs)


def normalize_curve(curve: np.ndarray, freqs: np.ndarray) -> SelectorCurve:
    peak = curve.max() if curve.size else 0.0
    if peak <= 0:
        return SelectorCurve(np.zeros_like(curve, dtype=np.float64), np.asarray(freqs), empty=True)
    return SelectorCurve(curve / peak, np.asarray(freqs))


def cm_selector(
    spec: Spectrogram,
    measure: CorrMeasure | str = "trimmed",
    median_filter: bool = True,
    border: str = "zero",
) -> tuple[SelectorCurve, CorrelationMap]:
    """Selector for one spectrogram; also returns the final map."""
    cm = enhance_cm(build_cm(spec, measure))
    if median_filter:
        cm = median_filter_2d(cm, border=border)
    return aggregate(cm), cm
