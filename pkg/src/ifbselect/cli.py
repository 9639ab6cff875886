"""Command-line front end: ``ifbselect <command> [options]``.

Exit codes: 0 success, 2 usage error, 3 input-format error, 4 degenerate result.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import sys
import warnings
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from .baselines import UNIMPLEMENTED_SELECTORS, spectral_kurtosis
from .cmap import aggregate, build_cm, enhance_cm, median_filter_2d
from .corr import MEASURES, CorrMeasure, DegenerateCorrelationWarning
from .harness import McConfig, SweepGrid, bench_cm, default_pipelines, mc_run, sweep
from .io import (
    InputFormatError,
    make_report,
    read_csv_columns,
    read_signal,
    write_curve,
    write_matrix,
    write_report,
    write_signal,
    write_table,
)
from .pipeline import PipelineConfig, analyze, median_average, segment
from .simulate import PRESETS, simulate
from .spectro import StftParams, spectrogram

log = logging.getLogger("ifbselect")

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_DEGENERATE = 0, 2, 3, 4


class UsageError(Exception):
    pass


def number_list(text: str) -> list[float]:
    """``"2,3,4"`` or a ``start:step:stop`` range such as ``"10:5:30"`` (inclusive)."""
    text = text.strip().strip("[]")
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) == 2:
            start, step, stop = parts[0], 1.0, parts[1]
        elif len(parts) == 3:
            start, step, stop = parts
        else:
            raise argparse.ArgumentTypeError(f"bad range {text!r}")
        if step <= 0:
            raise argparse.ArgumentTypeError("range step must be positive")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [start + i * step for i in range(max(n, 0))]
    return [float(p) for p in text.split(",") if p.strip()]


def name_list(text: str) -> list[str]:
    return [p.strip().lower() for p in text.split(",") if p.strip()]


# -- argument groups ---------------------------------------------------------


def _input_args(p):
    p.add_argument("input", type=Path, help="WAV or CSV recording")
    p.add_argument("--fs", type=float, default=None, help="sample rate in Hz (required for CSV)")
    p.add_argument("--channel", default="0", help="channel index or CSV column name")


def _stft_args(p):
    g = p.add_argument_group("STFT")
    g.add_argument("--window-len", type=int, default=256)
    g.add_argument("--overlap", type=int, default=217)
    g.add_argument("--nfft", type=int, default=512)


def _measure_args(p, choices=MEASURES, default="trimmed"):
    p.add_argument("--measure", default=default, choices=choices)
    p.add_argument("--trim-c", type=float, default=0.03)
    p.add_argument("--trim-mode", default="zero", choices=("zero", "delete"))


def _sim_args(p):
    g = p.add_argument_group("simulation")
    g.add_argument("--preset", default="default", choices=sorted(PRESETS))
    g.add_argument("--duration", type=float, default=None)
    g.add_argument("--sample-rate", type=float, default=None)
    g.add_argument("--fault-freq", type=float, default=None)
    g.add_argument("--aci", type=float, default=None)
    g.add_argument("--anci", type=float, default=None, help="upper bound of disturbance amplitude")
    g.add_argument("--nc-count", type=float, default=None, help="disturbances per second")


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(prog="ifbselect", description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--config", type=Path, default=None, help="INI file; [global] and [<command>] sections")
    parser.add_argument("--out-dir", type=Path, default=Path("."))
    parser.add_argument("--threads", type=int, default=None, help="worker processes (default: $IFB_THREADS or 1)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}

    p = subs["simulate"] = sub.add_parser("simulate", help="write a simulated signal")
    _sim_args(p)
    p.add_argument("--components", action="store_true", help="also write x_g, x_soi, x_nc")
    p.add_argument("--format", default="csv", choices=("csv", "wav"))

    p = subs["spectrogram"] = sub.add_parser("spectrogram", help="magnitude spectrogram as CSV")
    _input_args(p)
    _stft_args(p)

    p = subs["corr"] = sub.add_parser("corr", help="correlation of two CSV columns")
    p.add_argument("input", type=Path)
    p.add_argument("--x", default="0", help="first column (index or name)")
    p.add_argument("--y", default="1", help="second column (index or name)")
    _measure_args(p)

    p = subs["cmap"] = sub.add_parser("cmap", help="correlation map and selector")
    _input_args(p)
    _stft_args(p)
    _measure_args(p)
    p.add_argument("--no-median-filter", action="store_true")
    p.add_argument("--border", default="zero", choices=("zero", "replicate"))

    p = subs["analyze"] = sub.add_parser("analyze", help="select, filter and score a recording")
    _input_args(p)
    _stft_args(p)
    _measure_args(p, choices=MEASURES + ("kurtosis",) + UNIMPLEMENTED_SELECTORS)
    p.add_argument("--segments", type=int, default=1)
    p.add_argument("--fault-freq", type=float, required=True)
    p.add_argument("--harmonics", type=int, default=10)
    p.add_argument("--peak-tol", type=float, default=2.0)
    p.add_argument("--no-median-filter", action="store_true")
    p.add_argument("--border", default="zero", choices=("zero", "replicate"))
    p.add_argument("--filtered-format", default="wav", choices=("wav", "csv"))

    p = subs["mc"] = sub.add_parser("mc", help="Monte Carlo ENVSI distributions")
    _sim_args(p)
    _stft_args(p)
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--measures", type=name_list, default=list(MEASURES))
    p.add_argument("--no-median-filter", action="store_true", help="only run without the median filter")
    p.add_argument("--segments", type=int, default=1)

    p = subs["sweep"] = sub.add_parser("sweep", help="ENVSI over an (ACI, ANCI) grid")
    _sim_args(p)
    _stft_args(p)
    p.add_argument("--aci-values", "--aci-list", dest="aci_values", type=number_list, default=number_list("2:1:6"))
    p.add_argument("--anci-values", "--anci-list", dest="anci_values", type=number_list, default=number_list("10:5:30"))
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--measures", type=name_list, default=list(MEASURES))
    p.add_argument("--no-median-filter", action="store_true")

    p = subs["bench"] = sub.add_parser("bench", help="time correlation-map construction")
    p.add_argument("--durations", type=number_list, default=[1.0, 2.0])
    p.add_argument("--measures", type=name_list, default=list(MEASURES))
    p.add_argument("--repeats", type=int, default=3)
    _stft_args(p)

    p = subs["fetch-demo"] = sub.add_parser("fetch-demo", help="generate simulated stand-in recordings")
    p.add_argument("--preset", default="all", choices=("all", "crusher-like", "testrig-like"))
    return parser, subs


def _coerce(action: argparse.Action, raw: str):
    if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
        return raw.strip().lower() in ("1", "true", "yes", "on")
    return action.type(raw) if callable(action.type) else raw


def apply_config(path: Path, parser, subs, command: str) -> None:
    cp = configparser.ConfigParser()
    try:
        if not cp.read(path):
            raise InputFormatError(f"config file {path} not found")
    except configparser.Error as exc:
        raise InputFormatError(f"{path}: {exc}") from None
    for section, target in (("global", parser), (command, subs.get(command))):
        if target is None or not cp.has_section(section):
            continue
        actions = {a.dest: a for a in target._actions}
        values = {}
        for key, raw in cp.items(section):
            dest = key.replace("-", "_")
            if dest not in actions:
                raise UsageError(f"unknown key {key!r} in [{section}] of {path}")
            values[dest] = _coerce(actions[dest], raw)
        target.set_defaults(**values)


# -- helpers -----------------------------------------------------------------


def _channel(text):
    return int(text) if str(text).isdigit() else text


def _load(args):
    return read_signal(args.input, sample_rate=args.fs, channel=_channel(args.channel))


def _stft(args) -> StftParams:
    try:
        return StftParams(args.window_len, args.overlap, args.nfft)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _measure(args) -> CorrMeasure:
    return CorrMeasure(args.measure, args.trim_c, args.trim_mode)


def _sim_params(args):
    p = PRESETS[args.preset]
    overrides = {
        "duration": args.duration,
        "sample_rate": args.sample_rate,
        "fault_freq": args.fault_freq,
        "aci": args.aci,
        "anci_max": args.anci,
        "nc_count": args.nc_count,
    }
    return replace(p, seed=args.seed, **{k: v for k, v in overrides.items() if v is not None})


def _out(args, name: str) -> Path:
    args.out_dir.mkdir(parents=True, exist_ok=True)
    return args.out_dir / name


def _echo(msg: str) -> None:
    print(msg)


# -- commands ----------------------------------------------------------------


def cmd_simulate(args) -> int:
    params = _sim_params(args)
    sim = simulate(params)
    if args.format == "csv":
        cols = {"x": sim.x}
        if args.components:
            cols.update(x_g=sim.x_g, x_soi=sim.x_soi, x_nc=sim.x_nc)
        path = write_signal(_out(args, "simulated.csv"), cols, "csv")
        _echo(f"wrote {path}")
    else:
        parts = {"x": sim.x}
        if args.components:
            parts.update(x_g=sim.x_g, x_soi=sim.x_soi, x_nc=sim.x_nc)
        for name, s in parts.items():
            _echo(f"wrote {write_signal(_out(args, f'simulated_{name}.wav'), s, 'wav_float32')}")
    write_report(_out(args, "simulated.json"),
                 make_report("simulate", seed=params.seed, config=params.to_dict(),
                             extra={"soi_centers": sim.soi_centers, "nc_centers": sim.nc_centers,
                                    "nc_amplitudes": sim.nc_amplitudes}))
    return EXIT_OK


def cmd_spectrogram(args) -> int:
    spec = spectrogram(_load(args), _stft(args))
    path = write_matrix(_out(args, "spectrogram.csv"), spec.mag, spec.freqs, spec.times, corner="freq_hz\\time_s")
    _echo(f"wrote {path} ({spec.shape[0]} x {spec.shape[1]})")
    return EXIT_OK


def cmd_corr(args) -> int:
    header, data = read_csv_columns(args.input)

    def col(c):
        if c.isdigit():
            idx = int(c)
        elif header and c in header:
            idx = header.index(c)
        else:
            raise InputFormatError(f"no column {c!r}")
        if idx >= data.shape[1]:
            raise InputFormatError(f"no column {c!r}")
        return data[:, idx]

    measure = _measure(args)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DegenerateCorrelationWarning)
        value = measure(col(args.x), col(args.y))
    degenerate = any(issubclass(w.category, DegenerateCorrelationWarning) for w in caught)
    print(json.dumps({"measure": measure.tag, "value": value, "degenerate": degenerate}))
    return EXIT_DEGENERATE if degenerate else EXIT_OK


def cmd_cmap(args) -> int:
    spec = spectrogram(_load(args), _stft(args))
    cm = enhance_cm(build_cm(spec, _measure(args)))
    if not args.no_median_filter:
        cm = median_filter_2d(cm, args.border)
    curve = aggregate(cm)
    write_matrix(_out(args, "cmap.csv"), cm.values, cm.freqs, cm.freqs)
    write_curve(_out(args, "selector.csv"), curve.freqs, curve.values)
    _echo(f"wrote cmap.csv and selector.csv to {args.out_dir} (peak {curve.peak_freq:.1f} Hz)")
    return EXIT_DEGENERATE if curve.empty else EXIT_OK


def cmd_analyze(args) -> int:
    if args.measure in UNIMPLEMENTED_SELECTORS:
        raise UsageError(f"{args.measure} selector: not implemented; see references")
    sig = _load(args)
    measure = CorrMeasure(args.measure if args.measure in MEASURES else "trimmed", args.trim_c, args.trim_mode)
    cfg = PipelineConfig(
        segments=args.segments, stft=_stft(args), measure=measure,
        median_filter=not args.no_median_filter, fault_freq=args.fault_freq,
        harmonics=args.harmonics, peak_tol=args.peak_tol, border=args.border,
    )
    selector = None
    if args.measure == "kurtosis":
        parts = segment(sig, cfg.segments, min_length=cfg.stft.window_len)
        selector = median_average([spectral_kurtosis(spectrogram(p, cfg.stft)) for p in parts])
    res = analyze(sig, cfg, selector=selector)
    write_curve(_out(args, "selector.csv"), res.selector.freqs, res.selector.values)
    ext = "wav" if args.filtered_format == "wav" else "csv"
    write_signal(_out(args, f"filtered.{ext}"), res.filtered, "wav_float32" if ext == "wav" else "csv")
    amps_raw, freqs = res.ses_raw
    amps_filt, _ = res.ses_filtered
    np.savetxt(_out(args, "ses.csv"), np.column_stack([freqs, amps_raw, amps_filt]), delimiter=",",
               header="freq_hz,ses_raw,ses_filtered", comments="", fmt="%.17g")
    config = cfg.to_dict()
    config["selector"] = args.measure
    if args.measure not in MEASURES:
        config["measure"] = None
    config["input"] = str(args.input)
    report = make_report(
        "analyze", seed=args.seed, config=config, envsi=res.report.to_dict(),
        selector={"freqs": res.selector.freqs, "values": res.selector.values, "empty": res.selector.empty},
    )
    write_report(_out(args, "report.json"), report)
    r = res.report
    score = "n/a" if r.score_pct is None else f"{r.score_pct:+.1f}%"
    _echo(f"ENVSI raw {r.envsi_raw:.4f} filtered {r.envsi_filtered:.4f} score {score}; "
          f"selector peak {res.selector.peak_freq:.1f} Hz")
    return EXIT_DEGENERATE if r.degenerate else EXIT_OK


def _pipelines(args):
    for m in args.measures:
        if m not in MEASURES:
            raise UsageError(f"unknown measure {m!r}")
    mf = (False,) if args.no_median_filter else (False, True)
    return default_pipelines(args.measures, mf, _stft(args), getattr(args, "segments", 1))


def cmd_mc(args) -> int:
    cfg = McConfig(runs=args.runs, sim=_sim_params(args), pipelines=_pipelines(args),
                   base_seed=args.seed, workers=args.threads)
    res = mc_run(cfg)
    header, table = res.table()
    write_table(_out(args, "mc_envsi.csv"), header, table.tolist())
    summary = res.summary()
    write_report(_out(args, "mc_summary.json"), make_report(
        "mc", seed=args.seed,
        config={"runs": cfg.runs, "sim": cfg.sim.to_dict(), "pipelines": [p.to_dict() for p in cfg.pipelines]},
        envsi=summary, extra={"failures": res.failures}))
    for m, s in summary.items():
        score = "" if s["median_score_pct"] is None else f"  score {s['median_score_pct']:+.1f}%"
        _echo(f"{m:>14s}  median {s['median']:.4f}  [q1 {s['q1']:.4f}, q3 {s['q3']:.4f}]{score}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = McConfig(runs=args.runs, sim=_sim_params(args), pipelines=_pipelines(args),
                   base_seed=args.seed, workers=args.threads)
    grid = SweepGrid(list(args.aci_values), list(args.anci_values))
    res = sweep(cfg, grid)
    for m in res.methods:
        safe = m.replace("+", "_")
        write_matrix(_out(args, f"sweep_{safe}_envsi.csv"), res.median_envsi[m], grid.aci_values,
                     grid.anci_values, corner="aci\\anci")
        if m in res.median_score:
            write_matrix(_out(args, f"sweep_{safe}_score.csv"), res.median_score[m], grid.aci_values,
                         grid.anci_values, corner="aci\\anci")
    write_report(_out(args, "sweep_summary.json"), make_report(
        "sweep", seed=args.seed,
        config={"runs": cfg.runs, "sim": cfg.sim.to_dict(), "grid": asdict(grid)},
        envsi={m: res.median_envsi[m] for m in res.methods},
        extra={"median_score_pct": res.median_score, "failures": res.failures}))
    _echo(f"wrote sweep tables for {len(res.methods)} methods to {args.out_dir}")
    return EXIT_OK


def cmd_bench(args) -> int:
    for m in args.measures:
        if m not in MEASURES:
            raise UsageError(f"unknown measure {m!r}")
    results = bench_cm(args.durations, args.measures, repeats=args.repeats, seed=args.seed, stft=_stft(args))
    rows = [[r.measure, r.signal_duration, r.wall_time, r.n_freqs, r.n_frames, r.repeats] for r in results]
    write_table(_out(args, "bench.csv"), ["measure", "duration_s", "wall_time_s", "F", "T", "repeats"], rows)
    write_report(_out(args, "bench.json"), make_report("bench", seed=args.seed,
                                                       extra={"results": [asdict(r) for r in results]}))
    for r in results:
        _echo(f"{r.measure:>9s}  {r.signal_duration:6.1f} s  {r.wall_time:9.4f} s  ({r.n_freqs}x{r.n_frames})")
    return EXIT_OK


def cmd_fetch_demo(args) -> int:
    names = ("crusher-like", "testrig-like") if args.preset == "all" else (args.preset,)
    for name in names:
        params = replace(PRESETS[name], seed=args.seed)
        path = write_signal(_out(args, f"{name}.wav"), simulate(params).x, "wav_float32")
        write_report(_out(args, f"{name}.json"), make_report("fetch-demo", seed=args.seed, config=params.to_dict()))
        _echo(f"wrote {path} (fs {params.sample_rate:g} Hz, fault {params.fault_freq:g} Hz)")
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "spectrogram": cmd_spectrogram,
    "corr": cmd_corr,
    "cmap": cmd_cmap,
    "analyze": cmd_analyze,
    "mc": cmd_mc,
    "sweep": cmd_sweep,
    "bench": cmd_bench,
    "fetch-demo": cmd_fetch_demo,
}


def main(argv=None) -> int:
    parser, subs = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        pre, _ = parser.parse_known_args(argv)
        if pre.config is not None:
            apply_config(pre.config, parser, subs, pre.command)
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"ifbselect: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputFormatError as exc:
        print(f"ifbselect: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except InputFormatError as exc:
        print(f"ifbselect: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (UsageError, ValueError) as exc:
        print(f"ifbselect: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
