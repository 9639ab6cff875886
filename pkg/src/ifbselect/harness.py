"""Monte Carlo runs, amplitude sweeps and correlation-map timing benchmarks."""

from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from threadpoolctl import threadpool_limits

from .cmap import aggregate, build_cm, enhance_cm, median_filter_2d
from .corr import CorrMeasure
from .pipeline import PipelineConfig, apply_filter, envsi_value, median_average, segment
from .simulate import SimParams, simulate
from .spectro import StftParams, spectrogram

log = logging.getLogger(__name__)

RAW = "raw"


def default_pipelines(measures=("trimmed", "quadrant", "kendall", "pearson"), median_filter=(False, True),
                      stft: StftParams | None = None, segments: int = 1) -> list[PipelineConfig]:
    stft = stft or StftParams()
    return [
        PipelineConfig(segments=segments, stft=stft, measure=CorrMeasure(m), median_filter=mf)
        for m in measures
        for mf in median_filter
    ]


def worker_count(requested: int | None = None) -> int:
    """Explicit request, else the ``IFB_THREADS`` environment variable, else 1."""
    if requested:
        return max(1, int(requested))
    env = os.environ.get("IFB_THREADS")
    return max(1, int(env)) if env else 1


@dataclass
class McConfig:
    runs: int = 100
    sim: SimParams = field(default_factory=SimParams)
    pipelines: list[PipelineConfig] = field(default_factory=lambda: default_pipelines())
    base_seed: int = 0
    workers: int | None = None

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if not self.pipelines:
            raise ValueError("at least one pipeline is required")

    def labels(self) -> list[str]:
        labels, seen = [], {}
        for p in self.pipelines:
            lab = p.label
            seen[lab] = seen.get(lab, 0) + 1
            labels.append(lab if seen[lab] == 1 else f"{lab}#{seen[lab]}")
        return labels


@dataclass
class McResult:
    methods: list[str]
    seeds: np.ndarray
    envsi: dict[str, np.ndarray]
    degenerate: dict[str, np.ndarray]
    failures: list[dict]

    def median(self, method: str) -> float:
        return float(np.nanmedian(self.envsi[method]))

    def scores(self, method: str) -> np.ndarray:
        raw = self.envsi[RAW]
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(raw > 0, (self.envsi[method] - raw) / raw * 100.0, np.nan)

    def summary(self) -> dict:
        out = {}
        for m in self.methods:
            v = self.envsi[m]
            q1, med, q3 = np.nanpercentile(v, [25, 50, 75])
            out[m] = {
                "median": float(med),
                "q1": float(q1),
                "q3": float(q3),
                "n": int(np.isfinite(v).sum()),
                "n_degenerate": int(self.degenerate[m].sum()),
                "median_score_pct": None if m == RAW else float(np.nanmedian(self.scores(m))),
            }
        return out

    def table(self) -> tuple[list[str], np.ndarray]:
        """Header and (runs x (1 + methods)) matrix: seed, then ENVSI per method."""
        cols = [self.seeds.astype(np.float64)] + [self.envsi[m] for m in self.methods]
        return ["seed", *self.methods], np.column_stack(cols)


def _single_run(sim: SimParams, pipelines: list[PipelineConfig], labels: list[str]):
    """ENVSI of the raw and of every filtered version of one realization."""
    x = simulate(sim).x
    out = {RAW: (envsi_value(x, sim.fault_freq, pipelines[0].harmonics, pipelines[0].peak_tol), False)}
    errors = []
    enhanced_cache = {}
    for cfg, label in zip(pipelines, labels):
        try:
            key = (cfg.segments, cfg.stft, cfg.measure)
            if key not in enhanced_cache:
                parts = segment(x, cfg.segments, min_length=cfg.stft.window_len)
                enhanced_cache[key] = [enhance_cm(build_cm(spectrogram(p, cfg.stft), cfg.measure)) for p in parts]
            maps = enhanced_cache[key]
            if cfg.median_filter:
                maps = [median_filter_2d(m, cfg.border) for m in maps]
            curve = median_average([aggregate(m) for m in maps])
            if curve.empty:
                out[label] = (out[RAW][0], True)
            else:
                out[label] = (envsi_value(apply_filter(x, curve), sim.fault_freq, cfg.harmonics, cfg.peak_tol), False)
        except Exception as exc:  # a failed run is recorded, not fatal
            errors.append({"seed": sim.seed, "method": label, "error": repr(exc)})
            out[label] = (float("nan"), False)
    return out, errors


def _task(args):
    return _single_run(*args)


def mc_run(cfg: McConfig) -> McResult:
    """Repeat simulate -> select -> filter -> ENVSI for seeds ``base_seed + r``."""
    labels = cfg.labels()
    pipelines = [replace(p, fault_freq=cfg.sim.fault_freq) for p in cfg.pipelines]
    seeds = np.arange(cfg.runs, dtype=np.int64) + cfg.base_seed
    tasks = [(cfg.sim.with_seed(int(s)), pipelines, labels) for s in seeds]
    workers = worker_count(cfg.workers)
    if workers == 1:
        results = [_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_task, tasks))
    methods = [RAW, *labels]
    envsi = {m: np.array([r[0][m][0] for r in results]) for m in methods}
    degenerate = {m: np.array([r[0][m][1] for r in results]) for m in methods}
    failures = [e for r in results for e in r[1]]
    if failures:
        log.warning("%d of %d method runs failed", len(failures), cfg.runs * len(labels))
    return McResult(methods, seeds, envsi, degenerate, failures)


@dataclass
class SweepGrid:
    aci_values: list[float] = field(default_factory=lambda: [2.0, 3.0, 4.0, 5.0, 6.0])
    anci_values: list[float] = field(default_factory=lambda: [10.0, 15.0, 20.0, 25.0, 30.0])

    def __post_init__(self):
        if not self.aci_values or not self.anci_values:
            raise ValueError("sweep grid must be nonempty")
        if min(self.aci_values) <= 0 or min(self.anci_values) <= 0:
            raise ValueError("sweep amplitudes must be positive")


@dataclass
class SweepResult:
    grid: SweepGrid
    methods: list[str]
    median_envsi: dict[str, np.ndarray]  # method -> (n_aci, n_anci)
    median_score: dict[str, np.ndarray]
    failures: int


def sweep(cfg: McConfig, grid: SweepGrid | None = None) -> SweepResult:
    """One Monte Carlo batch per (ACI, ANCI) cell."""
    grid = grid or SweepGrid()
    shape = (len(grid.aci_values), len(grid.anci_values))
    methods = [RAW, *cfg.labels()]
    med = {m: np.full(shape, np.nan) for m in methods}
    score = {m: np.full(shape, np.nan) for m in methods if m != RAW}
    failures = 0
    for i, aci in enumerate(grid.aci_values):
        for j, anci in enumerate(grid.anci_values):
            cell = replace(cfg, sim=replace(cfg.sim, aci=float(aci), anci_max=float(anci)))
            res = mc_run(cell)
            failures += len(res.failures)
            for m in methods:
                med[m][i, j] = res.median(m)
                if m != RAW:
                    score[m][i, j] = float(np.nanmedian(res.scores(m)))
            log.info("cell aci=%g anci=%g done", aci, anci)
    return SweepResult(grid, methods, med, score, failures)


@dataclass
class BenchResult:
    measure: str
    signal_duration: float
    wall_time: float
    n_freqs: int
    n_frames: int
    repeats: int


def bench_cm(durations=(1.0,), measures=("pearson", "quadrant", "trimmed", "kendall"),
             repeats: int = 3, seed: int = 0, stft: StftParams | None = None,
             sim: SimParams | None = None) -> list[BenchResult]:
    """Median wall time of ``build_cm`` per (duration, measure), single-threaded BLAS."""
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    stft = stft or StftParams()
    base = sim or SimParams()
    results = []
    with threadpool_limits(limits=1):
        for dur in durations:
            spec = spectrogram(simulate(replace(base, duration=float(dur), seed=seed)).x, stft)
            warm = replace(spec, mag=spec.mag[:, : min(spec.mag.shape[1], 16)])
            for name in measures:
                measure = CorrMeasure(name)
                build_cm(warm, measure)
                times = []
                for _ in range(repeats):
                    t0 = time.perf_counter()
                    build_cm(spec, measure)
                    times.append(time.perf_counter() - t0)
                results.append(BenchResult(measure.kind, float(dur), float(np.median(times)),
                                           spec.mag.shape[0], spec.mag.shape[1], repeats))
                log.info("bench %s %.1fs: %.3fs", name, dur, results[-1].wall_time)
    return results
