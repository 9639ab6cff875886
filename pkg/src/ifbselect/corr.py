"""Pearson, Kendall (tau-a), quadrant and trimmed correlation coefficients.

Each estimator exists twice: a scalar version for a pair of vectors and a
matrix version computing all pairwise coefficients between the rows of a
2-D array (used to build correlation maps).  Degenerate inputs, such as a
constant vector or a pair left constant after trimming, give 0 rather than
NaN. The scalar versions also emit :class:`DegenerateCorrelationWarning`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ._validation import check_fraction, check_pair

MEASURES = ("pearson", "kendall", "quadrant", "trimmed")
TRIM_MODES = ("zero", "delete")

# element budget for the pairwise-sign blocks of the Kendall map
_KENDALL_BLOCK_ELEMENTS = 1 << 24


class DegenerateCorrelationWarning(RuntimeWarning):
    """A correlation was undefined (zero variance) and reported as 0."""


@dataclass(frozen=True)
class CorrMeasure:
    kind: str = "trimmed"
    trim_c: float = 0.03
    trim_mode: str = "zero"

    def __post_init__(self):
        kind = self.kind.lower()
        if kind not in MEASURES:
            raise ValueError(f"unknown measure {self.kind!r}; expected one of {MEASURES}")
        object.__setattr__(self, "kind", kind)
        check_fraction(self.trim_c, "trim_c")
        if self.trim_mode not in TRIM_MODES:
            raise ValueError(f"trim_mode must be one of {TRIM_MODES}")

    def __call__(self, x, y) -> float:
        if self.kind == "pearson":
            return pcc(x, y)
        if self.kind == "kendall":
            return kcc(x, y)
        if self.kind == "quadrant":
            return qcc(x, y)
        return tcc(x, y, self.trim_c, mode=self.trim_mode)

    @property
    def tag(self) -> str:
        if self.kind == "trimmed":
            return f"trimmed(c={self.trim_c:g},{self.trim_mode})"
        return self.kind


def _degenerate(what: str) -> float:
    warnings.warn(f"{what}: zero variance, correlation reported as 0",
                  DegenerateCorrelationWarning, stacklevel=3)
    return 0.0


def _pearson_raw(x: np.ndarray, y: np.ndarray) -> float | None:
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = np.dot(xc, xc)
    syy = np.dot(yc, yc)
    if sxx == 0.0 or syy == 0.0:
        return None
    r = np.dot(xc, yc) / np.sqrt(sxx * syy)
    return float(min(1.0, max(-1.0, r)))


def pcc(x, y) -> float:
    """Sample Pearson correlation coefficient."""
    x, y = check_pair(x, y, min_length=2)
    r = _pearson_raw(x, y)
    return _degenerate("pcc") if r is None else r


def _kendall_numerator(x: np.ndarray, y: np.ndarray) -> int:
    """Sum over i < j of sgn(x_i - x_j) * sgn(y_i - y_j), in bounded memory."""
    n = x.size
    block = max(1, _KENDALL_BLOCK_ELEMENTS // (4 * n))
    total = 0
    for a0 in range(0, n - 1, block):
        a1 = min(a0 + block, n - 1)
        sx = np.sign(x[a0:a1, None] - x[None, a0 + 1 :])
        sy = np.sign(y[a0:a1, None] - y[None, a0 + 1 :])
        # row r (i = a0 + r) needs j > i, i.e. column index >= r
        prod = np.triu(sx * sy)
        total += int(prod.sum())
    return total


def kcc(x, y) -> float:
    """Kendall tau-a: ``2 / (N (N - 1)) * sum_{i<j} sgn(dx) sgn(dy)``, ties count 0."""
    x, y = check_pair(x, y, min_length=2)
    n = x.size
    return 2.0 * _kendall_numerator(x, y) / (n * (n - 1))


def qcc(x, y) -> float:
    """Quadrant correlation: mean sign of the product of median deviations."""
    x, y = check_pair(x, y, min_length=1)
    s = np.sign(x - np.median(x)) * np.sign(y - np.median(y))
    return float(s.sum() / x.size)


def trim_mask(z: np.ndarray, c: float) -> np.ndarray:
    """Boolean mask keeping ``z_i`` strictly between the k-th smallest and k-th largest value.

    ``k = floor(c * N)``; ``k = 0`` keeps everything.  Values tied with either
    boundary order statistic are dropped as well.
    """
    n = z.shape[-1]
    k = int(np.floor(c * n))
    if k == 0:
        return np.ones(z.shape, dtype=bool)
    part = np.partition(z, (k - 1, n - k), axis=-1)
    lo = part[..., k - 1 : k]
    hi = part[..., n - k : n - k + 1]
    return (z > lo) & (z < hi)


def tcc(x, y, c: float = 0.03, mode: str = "zero") -> float:
    """Trimmed correlation: Pearson after removing the most extreme products ``x_i y_i``.

    With ``mode="zero"`` the trimmed observations are set to 0 and stay in
    the sample; ``mode="delete"`` drops them before the Pearson step.
    """
    x, y = check_pair(x, y, min_length=2)
    c = check_fraction(c, "c")
    keep = trim_mask(x * y, c)
    if mode == "zero":
        r = _pearson_raw(x * keep, y * keep)
    elif mode == "delete":
        r = _pearson_raw(x[keep], y[keep]) if keep.sum() >= 2 else None
    else:
        raise ValueError(f"mode must be one of {TRIM_MODES}")
    return _degenerate("tcc") if r is None else r


# -- matrix versions ---------------------------------------------------------


def _finish(g: np.ndarray, ok: np.ndarray) -> np.ndarray:
    """Mirror the upper triangle, zero degenerate rows, unit diagonal for the rest."""
    g = np.triu(g)
    g = g + np.triu(g, 1).T
    np.clip(g, -1.0, 1.0, out=g)
    g[~ok, :] = 0.0
    g[:, ~ok] = 0.0
    np.fill_diagonal(g, np.where(ok, 1.0, 0.0))
    return g


def _pearson_matrix(rows: np.ndarray) -> np.ndarray:
    xc = rows - rows.mean(axis=1, keepdims=True)
    g = xc @ xc.T
    d = np.diag(g).copy()
    # rounding in the mean can leave a tiny positive variance on a constant row
    ok = (d > 0) & (np.ptp(rows, axis=1) > 0)
    scale = np.sqrt(np.where(ok, d, 1.0))
    return _finish(g / np.outer(scale, scale), ok)


def _quadrant_matrix(rows: np.ndarray) -> np.ndarray:
    s = np.sign(rows - np.median(rows, axis=1, keepdims=True))
    g = (s @ s.T) / rows.shape[1]
    return _finish(g, np.ptp(rows, axis=1) > 0)


def _kendall_matrix(rows: np.ndarray) -> np.ndarray:
    f, t = rows.shape
    g = np.zeros((f, f))
    block = max(1, _KENDALL_BLOCK_ELEMENTS // (f * t))
    for a0 in range(0, t - 1, block):
        a1 = min(a0 + block, t - 1)
        d = np.sign(rows[:, a0:a1, None] - rows[:, None, a0 + 1 :]).astype(np.float32)
        # keep only b > a: within this block row r pairs with columns >= r
        d *= np.triu(np.ones((a1 - a0, t - a0 - 1), dtype=np.float32))
        d = d.reshape(f, -1)
        # integer partial sums below 2**24 are exact in float32
        g += (d @ d.T).astype(np.float64)
    g = 2.0 * g / (t * (t - 1))
    return _finish(g, np.ptp(rows, axis=1) > 0)


def _trimmed_matrix(rows: np.ndarray, c: float, mode: str, full: bool = False) -> np.ndarray:
    f, t = rows.shape
    g = np.zeros((f, f))
    for i in range(f):
        start = 0 if full else i
        other = rows[start:]
        keep = trim_mask(rows[i] * other, c)
        a = rows[i] * keep
        b = other * keep
        if mode == "zero":
            n_eff = np.full(keep.shape[0], float(t))
        else:
            n_eff = keep.sum(axis=1).astype(np.float64)
        with np.errstate(invalid="ignore", divide="ignore"):
            ac = (a - (a.sum(axis=1) / n_eff)[:, None])
            bc = (b - (b.sum(axis=1) / n_eff)[:, None])
            if mode == "delete":
                ac *= keep
                bc *= keep
            num = np.einsum("ij,ij->i", ac, bc)
            den = np.sqrt(np.einsum("ij,ij->i", ac, ac) * np.einsum("ij,ij->i", bc, bc))
            r = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
        g[i, start:] = r
    ok = np.ptp(rows, axis=1) > 0
    if full:
        np.clip(g, -1.0, 1.0, out=g)
        g[~ok, :] = 0.0
        g[:, ~ok] = 0.0
        np.fill_diagonal(g, np.where(ok, 1.0, 0.0))
        return g
    return _finish(g, ok)


def corr_matrix(rows, measure: CorrMeasure | str = "trimmed", *, full: bool = False) -> np.ndarray:
    """All pairwise correlations between the rows of ``rows`` (shape ``(F, T)``).

    Only the upper triangle is estimated and then mirrored.  ``full=True``
    evaluates every ordered pair of the trimmed estimator (the others are
    Gram products and symmetric by construction); it exists to check the
    mirroring.
    """
    if isinstance(measure, str):
        measure = CorrMeasure(measure)
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[1] < 2:
        raise ValueError("rows must be a 2-D array with at least two columns")
    if measure.kind == "pearson":
        return _pearson_matrix(rows)
    if measure.kind == "quadrant":
        return _quadrant_matrix(rows)
    if measure.kind == "kendall":
        return _kendall_matrix(rows)
    return _trimmed_matrix(rows, measure.trim_c, measure.trim_mode, full=full)
