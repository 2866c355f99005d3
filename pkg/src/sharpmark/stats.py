"""Correlation and error statistics used to validate objective scores."""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy.stats import rankdata

PSNR_CAP = 99.0


class DegenerateInputError(ValueError):
    """A statistic is undefined for the given data (e.g. zero variance)."""


def _pair(x, y, min_len: int) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.size} vs {y.size}")
    if x.size < min_len:
        raise ValueError(f"need at least {min_len} samples, got {x.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("inputs must be finite")
    return x, y


def _integer_pearson(a: list[int], b: list[int]) -> float:
    n = len(a)
    sa, sb = sum(a), sum(b)
    num = n * sum(i * j for i, j in zip(a, b)) - sa * sb
    da = n * sum(i * i for i in a) - sa * sa
    db = n * sum(j * j for j in b) - sb * sb
    if da == 0 or db == 0:
        raise DegenerateInputError("rank variance is zero")
    return num / math.sqrt(da * db)


def srocc(x, y) -> float:
    """Spearman rank-order correlation with average ranks for ties.

    Doubled average ranks are integers, so the Pearson sums are exact.
    """
    x, y = _pair(x, y, 3)
    rx = (2 * rankdata(x, method="average")).astype(np.int64).tolist()
    ry = (2 * rankdata(y, method="average")).astype(np.int64).tolist()
    return _integer_pearson(rx, ry)


def krocc(x, y) -> float:
    """Kendall tau-b."""
    x, y = _pair(x, y, 3)
    n = x.size
    iu = np.triu_indices(n, k=1)
    dx = np.sign(x[:, None] - x[None, :])[iu]
    dy = np.sign(y[:, None] - y[None, :])[iu]
    s = int(np.sum(dx * dy))
    n0 = n * (n - 1) // 2
    n1 = int(np.count_nonzero(dx == 0))
    n2 = int(np.count_nonzero(dy == 0))
    denom = (n0 - n1) * (n0 - n2)
    if denom == 0:
        raise DegenerateInputError("all pairs tied in at least one variable")
    return s / math.sqrt(denom)


def plcc(x, y) -> float:
    x, y = _pair(x, y, 3)
    xc = x - x.mean()
    yc = y - y.mean()
    sxx, syy = float(np.dot(xc, xc)), float(np.dot(yc, yc))
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateInputError("zero variance")
    r = float(np.dot(xc, yc)) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def rmse(x, y) -> float:
    x, y = _pair(x, y, 1)
    d = x - y
    return math.sqrt(float(np.mean(d * d)))


def psnr(ref: Sequence, test: Sequence) -> float:
    """PSNR in dB over all planes jointly, peak 1.0, capped at 99 dB."""
    ref_planes = [np.asarray(p, dtype=np.float64) for p in ref]
    test_planes = [np.asarray(p, dtype=np.float64) for p in test]
    if len(ref_planes) != len(test_planes) or any(
        a.shape != b.shape for a, b in zip(ref_planes, test_planes)
    ):
        raise ValueError("reference and test planes differ in count or shape")
    if not ref_planes:
        raise ValueError("no planes given")
    sq = sum(float(np.sum((a - b) ** 2)) for a, b in zip(ref_planes, test_planes))
    mse = sq / sum(a.size for a in ref_planes)
    if mse == 0.0:
        return PSNR_CAP
    return min(PSNR_CAP, 10.0 * math.log10(1.0 / mse))
