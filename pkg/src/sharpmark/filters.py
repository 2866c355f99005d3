"""Small-kernel convolution and sliding-window statistics.

Every windowed operation pads by replicating edge samples, and every output
has the same shape as its input.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import ndimage

from .image import as_plane


def _check_odd(n: int, name: str) -> int:
    if int(n) != n or n < 1 or n % 2 == 0:
        raise ValueError(f"{name} must be an odd positive integer, got {n!r}")
    return int(n)


def as_kernel(taps) -> np.ndarray:
    kernel = np.asarray(taps, dtype=np.float64)
    if kernel.ndim != 2 or kernel.shape[0] != kernel.shape[1]:
        raise ValueError(f"kernel must be square, got shape {kernel.shape}")
    _check_odd(kernel.shape[0], "kernel size")
    if not np.all(np.isfinite(kernel)):
        raise ValueError("kernel taps must be finite")
    return kernel


def gaussian_kernel(size: int, sigma: float) -> np.ndarray:
    """Unit-sum ``size x size`` Gaussian sampled on the centred integer grid."""
    size = _check_odd(size, "size")
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    r = size // 2
    x = np.arange(-r, r + 1, dtype=np.float64)
    taps = np.exp(-(x[:, None] ** 2 + x[None, :] ** 2) / (2.0 * sigma * sigma))
    return taps / taps.sum()


def highpass_from_gaussian(size: int, sigma: float) -> np.ndarray:
    """All-pass (centred unit impulse) minus :func:`gaussian_kernel`."""
    taps = -gaussian_kernel(size, sigma)
    c = size // 2
    taps[c, c] += 1.0
    return taps


def convolve2d(img, kernel) -> np.ndarray:
    """Same-size true 2-D convolution (kernel flipped) with replicate-edge padding."""
    plane = as_plane(img)
    kernel = as_kernel(kernel)
    if kernel.shape[0] > 2 * min(plane.shape) + 1:
        raise ValueError(
            f"{kernel.shape[0]}x{kernel.shape[0]} kernel is too large for a "
            f"{plane.shape[0]}x{plane.shape[1]} plane"
        )
    return ndimage.convolve(plane, kernel, mode="nearest")


def gaussian_blur(img, sigma: float) -> np.ndarray:
    """Gaussian blur with the kernel truncated at radius ``ceil(3 sigma)``."""
    if sigma < 0:
        raise ValueError(f"sigma must be non-negative, got {sigma!r}")
    plane = as_plane(img)
    if sigma == 0:
        return plane
    size = 2 * math.ceil(3.0 * sigma) + 1
    return ndimage.convolve(plane, gaussian_kernel(size, sigma), mode="nearest")


def _block_edges(n: int, b: int) -> np.ndarray:
    return np.arange(0, n, b)


def block_mean_nonoverlap(img, b: int) -> np.ndarray:
    """Replace each pixel by the mean of its ``b x b`` tile.

    Tiles start at the top-left corner; tiles on the bottom and right edges
    may be partial and are averaged over the pixels they actually hold.
    """
    if int(b) != b or b < 1:
        raise ValueError(f"block size must be a positive integer, got {b!r}")
    b = int(b)
    plane = as_plane(img)
    h, w = plane.shape
    rows, cols = _block_edges(h, b), _block_edges(w, b)
    sums = np.add.reduceat(np.add.reduceat(plane, rows, axis=0), cols, axis=1)
    counts = np.outer(np.diff(np.append(rows, h)), np.diff(np.append(cols, w)))
    means = sums / counts
    return np.repeat(np.repeat(means, b, axis=0)[:h], b, axis=1)[:, :w]


def local_std(img, b: int) -> np.ndarray:
    """Population standard deviation over the centred ``b x b`` window.

    Two passes over samples shifted by the window's centre value, so flat
    windows give exactly zero and large offsets do not cost precision.
    """
    b = _check_odd(b, "window size")
    plane = as_plane(img)
    if b == 1:
        return np.zeros(plane.shape)
    h, w = plane.shape
    r = b // 2
    padded = np.pad(plane, r, mode="edge")
    n = float(b * b)

    total = np.zeros((h, w))
    for u in range(b):
        for v in range(b):
            total += padded[u:u + h, v:v + w] - plane
    mean = total / n

    sq = np.zeros((h, w))
    for u in range(b):
        for v in range(b):
            d = (padded[u:u + h, v:v + w] - plane) - mean
            sq += d * d
    return np.sqrt(sq / n)


def block_median_overlap(img, n: int) -> np.ndarray:
    """Median over the centred ``n x n`` window (replicate-edge)."""
    n = _check_odd(n, "window size")
    plane = as_plane(img)
    return ndimage.median_filter(plane, size=n, mode="nearest")
