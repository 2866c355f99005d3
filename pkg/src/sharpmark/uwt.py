"""Single-level undecimated 2-D Haar wavelet transform."""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .image import as_plane

_S = 1.0 / np.sqrt(2.0)


class UwtSubbands(NamedTuple):
    ll: np.ndarray
    lh: np.ndarray  # horizontal detail: low along rows, high along columns
    hl: np.ndarray  # vertical detail: high along rows, low along columns
    hh: np.ndarray  # diagonal detail


def _low(x: np.ndarray, axis: int) -> np.ndarray:
    # out[i] = (x[i] + x[i-1]) / sqrt2, index wrapped
    return _S * (x + np.roll(x, 1, axis=axis))


def _high(x: np.ndarray, axis: int) -> np.ndarray:
    # difference first, so a constant offset cancels exactly
    return _S * (x - np.roll(x, 1, axis=axis))


def uwt_haar_level1(img) -> UwtSubbands:
    """Return the four same-size subbands of a one-level stationary Haar transform.

    Rows are filtered first (along axis 1), then columns (axis 0), with
    periodic extension.  Odd sizes are handled by plain index wrap-around.
    """
    plane = as_plane(img)
    if plane.shape[0] < 2 or plane.shape[1] < 2:
        raise ValueError(f"UWT needs at least a 2x2 plane, got {plane.shape}")
    lo_rows = _low(plane, axis=1)
    hi_rows = _high(plane, axis=1)
    return UwtSubbands(
        ll=_low(lo_rows, axis=0),
        lh=_high(lo_rows, axis=0),
        hl=_low(hi_rows, axis=0),
        hh=_high(hi_rows, axis=0),
    )
