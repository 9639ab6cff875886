"""STFT and magnitude spectrogram (Hamming window, unnormalized forward DFT)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ._validation import check_signal
from .signal import Signal, as_signal


@dataclass(frozen=True)
class StftParams:
    window_len: int = 256
    overlap: int = 217
    nfft: int = 512
    window_kind: str = "hamming"

    def __post_init__(self):
        if not 0 <= self.overlap < self.window_len <= self.nfft:
            raise ValueError(
                "need 0 <= overlap < window_len <= nfft, got "
                f"{self.overlap}, {self.window_len}, {self.nfft}"
            )
        if self.window_kind.lower() != "hamming":
            raise ValueError(f"unsupported window {self.window_kind!r}; only 'hamming'")

    @property
    def hop(self) -> int:
        return self.window_len - self.overlap

    @property
    def n_freqs(self) -> int:
        return self.nfft // 2 + 1

    def n_frames(self, n_samples: int) -> int:
        if n_samples < self.window_len:
            return 0
        return (n_samples - self.window_len) // self.hop + 1


def hamming(n: int) -> np.ndarray:
    """Symmetric Hamming window, ``0.54 - 0.46 cos(2 pi k / (n - 1))``."""
    if n < 1:
        raise ValueError("window length must be >= 1")
    return np.hamming(n)


@dataclass(frozen=True, eq=False)
class Spectrogram:
    mag: np.ndarray  # (F, T)
    freqs: np.ndarray
    times: np.ndarray
    params: StftParams
    sample_rate: float

    @property
    def shape(self) -> tuple[int, int]:
        return self.mag.shape


def stft(signal, params: StftParams | None = None) -> np.ndarray:
    """One-sided complex STFT, shape ``(nfft // 2 + 1, n_frames)``.

    Frames start every ``window_len - overlap`` samples; frames that would run
    past the end of the signal are dropped.
    """
    p = params or StftParams()
    x = signal.samples if isinstance(signal, Signal) else check_signal(signal)
    if x.size < p.window_len:
        raise ValueError(f"signal of {x.size} samples is shorter than one window ({p.window_len})")
    frames = sliding_window_view(x, p.window_len)[:: p.hop]
    return np.fft.rfft(frames * hamming(p.window_len), n=p.nfft, axis=1).T


def spectrogram(signal, params: StftParams | None = None, sample_rate=None) -> Spectrogram:
    sig = as_signal(signal, sample_rate)
    p = params or StftParams()
    mag = np.abs(stft(sig, p))
    fs = sig.sample_rate
    freqs = np.arange(p.n_freqs) * fs / p.nfft
    times = (np.arange(mag.shape[1]) * p.hop + p.window_len / 2) / fs
    return Spectrogram(mag=mag, freqs=freqs, times=times, params=p, sample_rate=fs)
