"""Input validation helpers shared by the functional API and the estimators."""

from __future__ import annotations

import numpy as np


def check_signal(x, *, name: str = "x", min_length: int = 1) -> np.ndarray:
    """Return ``x`` as a finite 1-D float64 array.

    A 2-D input with a single column or row is flattened; anything else with
    more than one dimension is rejected.
    """
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 2 and 1 in arr.shape:
        arr = arr.ravel()
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < min_length:
        raise ValueError(f"{name} needs at least {min_length} samples, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or infinite values")
    return arr


def check_pair(x, y, *, min_length: int = 1) -> tuple[np.ndarray, np.ndarray]:
    x = check_signal(x, name="x", min_length=min_length)
    y = check_signal(y, name="y", min_length=min_length)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.size} vs {y.size}")
    return x, y


def check_sample_rate(fs) -> float:
    fs = float(fs)
    if not np.isfinite(fs) or fs <= 0:
        raise ValueError(f"sample_rate must be positive, got {fs}")
    return fs


def check_fraction(value, name: str, low: float = 0.0, high: float = 0.5) -> float:
    """Check ``low <= value < high``."""
    value = float(value)
    if not (low <= value < high):
        raise ValueError(f"{name} must lie in [{low}, {high}), got {value}")
    return value


def check_positive_int(value, name: str) -> int:
    if int(value) != value or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)
