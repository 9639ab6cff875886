"""Reference selectors for head-to-head comparison."""

from __future__ import annotations

import numpy as np

from .cmap import SelectorCurve, normalize_curve
from .spectro import Spectrogram

# Named in the literature but defined elsewhere; the CLI reserves these names.
UNIMPLEMENTED_SELECTORS = ("alpha", "cvb")


def spectral_kurtosis(spec: Spectrogram) -> SelectorCurve:
    """Excess kurtosis of each spectrogram row, floored at 0 and max-normalized.

    Computed on the magnitudes (not the complex STFT), so the Gaussian
    reference value is not exactly 0; only the shape of the curve matters.
    """
    mag = spec.mag
    if mag.shape[1] < 4:
        raise ValueError("spectral kurtosis needs at least 4 time frames")
    dev = mag - mag.mean(axis=1, keepdims=True)
    m2 = np.mean(dev**2, axis=1)
    m4 = np.mean(dev**4, axis=1)
    ok = m2 > 0
    kurt = np.zeros(mag.shape[0])
    kurt[ok] = m4[ok] / m2[ok] ** 2 - 3.0
    return normalize_curve(np.maximum(kurt, 0.0), spec.freqs)
