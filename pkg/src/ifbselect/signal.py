from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_sample_rate, check_signal


@dataclass(frozen=True, eq=False)
class Signal:
    """A sampled real time series."""

    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        object.__setattr__(self, "samples", check_signal(self.samples, name="samples"))
        object.__setattr__(self, "sample_rate", check_sample_rate(self.sample_rate))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    def __eq__(self, other):
        if not isinstance(other, Signal):
            return NotImplemented
        return self.sample_rate == other.sample_rate and np.array_equal(self.samples, other.samples)


def as_signal(x, sample_rate=None) -> Signal:
    """Wrap an array as a :class:`Signal`; a Signal passes through untouched."""
    if isinstance(x, Signal):
        if sample_rate is not None and float(sample_rate) != x.sample_rate:
            raise ValueError("sample_rate conflicts with the Signal's own rate")
        return x
    if sample_rate is None:
        raise ValueError("sample_rate is required for a bare array")
    return Signal(x, sample_rate)
