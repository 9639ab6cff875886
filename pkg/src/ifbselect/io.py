"""Reading/writing recordings, curves, matrices and JSON reports."""

from __future__ import annotations

import csv
import json
import math
import subprocess
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.io import wavfile

from . import __version__
from .signal import Signal

REPORT_SCHEMA = "ifbselect.report/1"
FORMATS = ("wav_float32", "wav_pcm16", "csv")


class InputFormatError(ValueError):
    """A recording or config file could not be parsed."""


@dataclass(frozen=True)
class RecordingFile:
    path: Path
    format: str | None = None  # inferred from the suffix when None
    channel: int | str = 0
    sample_rate: float | None = None

    def resolved_format(self) -> str:
        if self.format:
            return self.format
        suffix = Path(self.path).suffix.lower()
        if suffix == ".csv":
            return "csv"
        if suffix == ".wav":
            return "wav"
        raise InputFormatError(f"cannot infer format of {self.path}; use .wav or .csv")


def _parse_float(s: str) -> float | None:
    try:
        return float(s)
    except ValueError:
        return None


def read_csv_columns(path) -> tuple[list[str] | None, np.ndarray]:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise InputFormatError(f"{path} is empty")
    header = None
    if any(_parse_float(c) is None for c in rows[0]):
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
    if not rows:
        raise InputFormatError(f"{path} has a header but no data")
    try:
        data = np.array([[float(c) for c in r] for r in rows], dtype=np.float64)
    except ValueError as exc:
        raise InputFormatError(f"{path}: non-numeric value ({exc})") from None
    if data.ndim != 2 or (header and data.shape[1] != len(header)):
        raise InputFormatError(f"{path}: ragged rows")
    return header, data


def read_signal(file: RecordingFile | str | Path, sample_rate: float | None = None, channel: int | str = 0) -> Signal:
    """Load one channel of a WAV or CSV recording.

    PCM16 WAV samples are scaled by 1/32768.  CSV files carry no sample rate,
    so ``sample_rate`` is mandatory for them; ``channel`` may be a column
    index or a header name.
    """
    if not isinstance(file, RecordingFile):
        file = RecordingFile(Path(file), channel=channel, sample_rate=sample_rate)
    path = Path(file.path)
    if not path.exists():
        raise InputFormatError(f"{path} does not exist")
    fmt = file.resolved_format()
    if fmt.startswith("wav"):
        try:
            fs, data = wavfile.read(path)
        except (ValueError, EOFError) as exc:
            raise InputFormatError(f"{path}: {exc}") from None
        if data.dtype == np.int16:
            data = data.astype(np.float64) / 32768.0
        elif data.dtype == np.int32:
            data = data.astype(np.float64) / 2147483648.0
        elif data.dtype == np.uint8:
            data = (data.astype(np.float64) - 128.0) / 128.0
        else:
            data = data.astype(np.float64)
        if file.sample_rate is not None:
            fs = file.sample_rate
        if data.ndim == 2:
            if not isinstance(file.channel, int) or file.channel >= data.shape[1]:
                raise InputFormatError(f"{path}: no channel {file.channel!r}")
            data = data[:, file.channel]
    elif fmt == "csv":
        if file.sample_rate is None:
            raise InputFormatError("CSV input requires an explicit sample rate")
        fs = file.sample_rate
        header, data = read_csv_columns(path)
        col = file.channel
        if isinstance(col, str) and not col.isdigit():
            if not header or col not in header:
                raise InputFormatError(f"{path}: no column named {col!r}")
            col = header.index(col)
        col = int(col)
        if col >= data.shape[1]:
            raise InputFormatError(f"{path}: no column {col}")
        data = data[:, col]
    else:
        raise InputFormatError(f"unknown format {fmt!r}")
    if data.size == 0:
        raise InputFormatError(f"{path} contains no samples")
    try:
        return Signal(data, fs)
    except ValueError as exc:
        raise InputFormatError(f"{path}: {exc}") from None


def write_signal(path, signal: Signal | dict[str, Signal], fmt: str | None = None) -> Path:
    """Write a signal (or several named signals of equal length/rate) as CSV or WAV."""
    path = Path(path)
    signals = signal if isinstance(signal, dict) else {"sample": signal}
    first = next(iter(signals.values()))
    fmt = fmt or ("csv" if path.suffix.lower() == ".csv" else "wav_float32")
    if fmt == "csv":
        data = np.column_stack([s.samples for s in signals.values()])
        np.savetxt(path, data, delimiter=",", header=",".join(signals), comments="", fmt="%.17g")
    elif fmt in ("wav", "wav_float32", "wav_pcm16"):
        data = np.column_stack([s.samples for s in signals.values()])
        data = data[:, 0] if data.shape[1] == 1 else data
        rate = int(round(first.sample_rate))
        if rate != first.sample_rate:
            raise ValueError("WAV needs an integer sample rate")
        if fmt == "wav_pcm16":
            data = np.clip(np.round(data * 32768.0), -32768, 32767).astype(np.int16)
        else:
            data = data.astype(np.float32)
        wavfile.write(path, rate, data)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return path


def write_curve(path, freqs, values, names=("freq_hz", "value")) -> Path:
    np.savetxt(path, np.column_stack([freqs, values]), delimiter=",",
               header=",".join(names), comments="", fmt="%.17g")
    return Path(path)


def write_matrix(path, matrix, row_axis, col_axis, corner="freq_hz") -> Path:
    """CSV with ``col_axis`` as the header row and ``row_axis`` as the first column."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([corner, *(f"{c:.17g}" for c in col_axis)])
        for r, row in zip(row_axis, matrix):
            w.writerow([f"{r:.17g}", *(f"{v:.17g}" for v in row)])
    return Path(path)


def write_table(path, header, rows) -> Path:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow(row)
    return Path(path)


def version_string() -> str:
    """``git describe`` of the source tree when available, else the package version."""
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True, text=True, timeout=5,
        )
        if out.returncode == 0 and out.stdout.strip():
            return f"{__version__}+{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        return None if not math.isfinite(obj) else float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, Path):
        return str(obj)
    return obj


REPORT_FIELDS = ("command", "seed", "config", "envsi", "selector", "extra")


def make_report(command: str, *, seed=None, config=None, envsi=None, selector=None, extra=None) -> dict:
    """Report document; optional sections are present as ``None`` when absent."""
    doc = {"schema": REPORT_SCHEMA, "version": version_string()}
    doc.update(command=command, seed=seed, config=config, envsi=envsi, selector=selector, extra=extra)
    return _jsonable(doc)


def write_report(path, report: dict) -> Path:
    path = Path(path)
    path.write_text(json.dumps(_jsonable(report), indent=2, sort_keys=True, allow_nan=False))
    return path


def read_report(path) -> dict:
    return json.loads(Path(path).read_text())
