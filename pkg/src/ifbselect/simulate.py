"""Simulated bearing vibration: Gaussian noise + cyclic fault impulses + random disturbances.

Random streams
--------------
Every realization is driven by ``numpy.random.SeedSequence(seed)`` spawned into
three independent PCG64 streams, in this order:

1. Gaussian background noise,
2. fractional bandwidths of the cyclic (fault) pulses,
3. non-cyclic pulses: centre times, then amplitudes, then bandwidths.

Because the streams are independent, changing e.g. ``nc_count`` leaves the
noise and the fault component untouched.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace

import numpy as np

from .signal import Signal

BW_REFERENCE_DB = -6.0


def gauss_pulse(fc: float, bw: float, fs: float, trunc_db: float = -60.0) -> np.ndarray:
    """Unit-amplitude Gaussian-modulated cosine sampled on a symmetric grid.

    ``bw`` is the fractional bandwidth measured at -6 dB; the pulse is cut where
    its envelope first drops below ``trunc_db``.  The returned vector has odd
    length with its peak (exactly 1.0) in the middle.
    """
    if not 0.0 < bw < 1.0:
        raise ValueError(f"fractional bandwidth must lie in (0, 1), got {bw}")
    if fc <= 0 or fc >= fs / 2:
        raise ValueError(f"carrier {fc} Hz must lie in (0, fs/2) for fs={fs}")
    if trunc_db >= 0:
        raise ValueError("trunc_db must be negative")
    ref = 10.0 ** (BW_REFERENCE_DB / 20.0)
    fv = -((bw * fc) ** 2) / (8.0 * np.log(ref))
    tv = 1.0 / (4.0 * np.pi**2 * fv)
    # envelope exp(-t^2 / (2 tv)) equals the truncation level at t_cut
    t_cut = np.sqrt(-2.0 * tv * np.log(10.0 ** (trunc_db / 20.0)))
    half = int(np.floor(t_cut * fs)) + 1
    t = np.arange(-half, half + 1) / fs
    return np.exp(-(t**2) / (2.0 * tv)) * np.cos(2.0 * np.pi * fc * t)


@dataclass(frozen=True)
class SimParams:
    sample_rate: float = 25_000.0
    duration: float = 1.0
    fault_freq: float = 30.0
    soi_carrier: float = 2_500.0
    nc_carrier: float = 6_000.0
    aci: float = 3.0
    anci_max: float = 20.0
    nc_count: float = 15.0
    bw_range: tuple[float, float] = (0.4, 0.5)
    noise_sigma: float = 1.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "bw_range", tuple(float(b) for b in self.bw_range))
        lo, hi = self.bw_range
        if self.sample_rate <= 2 * max(self.soi_carrier, self.nc_carrier):
            raise ValueError("sample_rate must exceed twice the highest carrier")
        if self.fault_freq <= 0:
            raise ValueError("fault_freq must be positive")
        if not 0 < lo <= hi < 1:
            raise ValueError(f"bw_range must satisfy 0 < low <= high < 1, got {self.bw_range}")
        if self.aci < 0 or self.anci_max < 0 or self.nc_count < 0:
            raise ValueError("aci, anci_max and nc_count must be non-negative")
        if self.duration * self.fault_freq < 1:
            raise ValueError("duration must cover at least one fault period")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be non-negative")

    def with_seed(self, seed: int) -> "SimParams":
        return replace(self, seed=int(seed))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["bw_range"] = list(self.bw_range)
        return d


@dataclass(frozen=True, eq=False)
class SimulatedSignal:
    x: Signal
    x_g: Signal
    x_soi: Signal
    x_nc: Signal
    soi_centers: np.ndarray
    nc_centers: np.ndarray
    nc_amplitudes: np.ndarray


# Presets standing in for the two measured datasets (no real data is bundled).
PRESETS = {
    "default": SimParams(),
    "crusher-like": SimParams(duration=6.0, fault_freq=30.7),
    "testrig-like": SimParams(
        sample_rate=50_000.0, duration=6.0, fault_freq=91.11, soi_carrier=22_500.0
    ),
}


def _add_pulse(out: np.ndarray, pulse: np.ndarray, center: int, amp: float) -> None:
    half = pulse.size // 2
    lo, hi = center - half, center + half + 1
    p_lo, p_hi = max(0, -lo), pulse.size - max(0, hi - out.size)
    out[max(lo, 0) : min(hi, out.size)] += amp * pulse[p_lo:p_hi]


def _streams(seed: int):
    children = np.random.SeedSequence(int(seed)).spawn(3)
    return [np.random.Generator(np.random.PCG64(c)) for c in children]


def simulate(params: SimParams | None = None) -> SimulatedSignal:
    """Draw one realization of the three-component mixture."""
    p = params or SimParams()
    fs = p.sample_rate
    n = int(round(p.duration * fs))
    noise_rng, soi_rng, nc_rng = _streams(p.seed)

    x_g = noise_rng.normal(0.0, p.noise_sigma, n)

    period = int(round(fs / p.fault_freq))
    soi_centers = np.arange(period, n, period, dtype=np.int64)
    soi_bw = soi_rng.uniform(*p.bw_range, size=soi_centers.size)
    x_soi = np.zeros(n)
    for c, bw in zip(soi_centers, soi_bw):
        _add_pulse(x_soi, gauss_pulse(p.soi_carrier, bw, fs), int(c), p.aci)

    n_nc = int(round(p.nc_count * p.duration))
    t_nc = nc_rng.uniform(0.0, p.duration, size=n_nc)
    amps = nc_rng.uniform(0.0, p.anci_max, size=n_nc)
    nc_bw = nc_rng.uniform(*p.bw_range, size=n_nc)
    nc_centers = np.minimum(np.round(t_nc * fs).astype(np.int64), n - 1)
    x_nc = np.zeros(n)
    for c, a, bw in zip(nc_centers, amps, nc_bw):
        _add_pulse(x_nc, gauss_pulse(p.nc_carrier, bw, fs), int(c), a)

    x = x_g + x_soi + x_nc
    return SimulatedSignal(
        x=Signal(x, fs),
        x_g=Signal(x_g, fs),
        x_soi=Signal(x_soi, fs),
        x_nc=Signal(x_nc, fs),
        soi_centers=soi_centers,
        nc_centers=nc_centers,
        nc_amplitudes=amps,
    )
