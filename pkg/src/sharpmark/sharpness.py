"""Contrast-weighted high-frequency sharpness score and maps.

Pipeline per channel: high-pass stimulus, removal of its blockwise mean,
exponentiation, and weighting by normalised local standard deviation.  The
channels are then averaged and re-rooted into a total stimulus.  A log-ratio
turns that into a raw sharpness map.  The border is cropped off and the
score is the map maximum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .filters import (
    block_mean_nonoverlap,
    block_median_overlap,
    convolve2d,
    highpass_from_gaussian,
    local_std,
)
from .image import InputImage, ImageKind, to_ycbcr
from .uwt import uwt_haar_level1

# exp() argument ceiling for the localized map
_MAX_EXP_ARG = math.log(np.finfo(np.float64).max) - 1.0


class Backend(str, Enum):
    HPF = "hpf"
    UWT = "uwt"


class GrayMode(str, Enum):
    SINGLE = "single"  # TS = T_Y ** (1/alpha)
    THIRD = "third"    # TS = (T_Y / 3) ** (1/alpha), missing chroma counted as zero


@dataclass(frozen=True)
class SharpnessConfig:
    alpha: float = 2.0
    block: int = 7
    epsilon: float = 1e-4
    backend: Backend = Backend.HPF
    hpf_sigma: float = 0.25
    hpf_size: int = 3
    border: int | None = None  # defaults to ``block``
    gray_mode: GrayMode = GrayMode.SINGLE

    def __post_init__(self):
        object.__setattr__(self, "backend", Backend(self.backend))
        object.__setattr__(self, "gray_mode", GrayMode(self.gray_mode))
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be a positive finite number, got {self.alpha!r}")
        if not (self.epsilon > 0 and math.isfinite(self.epsilon)):
            raise ValueError(f"epsilon must be a positive finite number, got {self.epsilon!r}")
        if int(self.block) != self.block or self.block < 3 or self.block % 2 == 0:
            raise ValueError(f"block must be an odd integer >= 3, got {self.block!r}")
        if int(self.hpf_size) != self.hpf_size or self.hpf_size < 1 or self.hpf_size % 2 == 0:
            raise ValueError(f"hpf_size must be an odd positive integer, got {self.hpf_size!r}")
        if not self.hpf_sigma > 0:
            raise ValueError(f"hpf_sigma must be positive, got {self.hpf_sigma!r}")
        if self.border is not None and (int(self.border) != self.border or self.border < 0):
            raise ValueError(f"border must be a non-negative integer, got {self.border!r}")

    @property
    def border_width(self) -> int:
        return self.block if self.border is None else int(self.border)

    @property
    def median_window(self) -> int:
        n = self.block + 2
        return n if n % 2 == 1 else n + 1


@dataclass(frozen=True)
class SharpnessResult:
    score: float
    s_map: np.ndarray
    bs_map: np.ndarray
    lbs_map: np.ndarray
    gamma: float


def stimulus(channel, cfg: SharpnessConfig) -> np.ndarray:
    """High-frequency content of one channel for the configured backend."""
    if cfg.backend is Backend.HPF:
        return convolve2d(channel, highpass_from_gaussian(cfg.hpf_size, cfg.hpf_sigma))
    return uwt_haar_level1(channel).hh


def mean_bias_removal(h, b: int) -> np.ndarray:
    h = np.asarray(h, dtype=np.float64)
    return np.abs(h - block_mean_nonoverlap(h, b))


def weighted_channel(mh, s, cfg: SharpnessConfig) -> np.ndarray:
    """``mh**alpha`` weighted by the share of total local contrast at each pixel.

    ``epsilon`` is added to the contrast total so flat channels give zeros
    instead of 0/0.
    """
    mh = np.asarray(mh, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    if mh.shape != s.shape:
        raise ValueError(f"shape mismatch: {mh.shape} vs {s.shape}")
    return mh ** cfg.alpha * s / (s.sum() + cfg.epsilon)


def total_stimulus(t_y, t_cb, t_cr, channel_count: int, cfg: SharpnessConfig) -> np.ndarray:
    if channel_count == 3:
        mean = (np.asarray(t_y) + np.asarray(t_cb) + np.asarray(t_cr)) / 3.0
    elif channel_count == 1:
        mean = np.asarray(t_y, dtype=np.float64)
        if cfg.gray_mode is GrayMode.THIRD:
            mean = mean / 3.0
    else:
        raise ValueError(f"channel_count must be 1 or 3, got {channel_count!r}")
    return mean ** (1.0 / cfg.alpha)


def raw_map(ts, cfg: SharpnessConfig) -> np.ndarray:
    """Log-ratio map ``|log eps + eps| / |log(ts + eps) + eps|``.

    Equals 1 where ``ts`` is 0 and grows as ``ts`` approaches ``1 - eps``.
    """
    eps = cfg.epsilon
    ts = np.asarray(ts, dtype=np.float64)
    num = abs(math.log(eps) + eps)
    den = np.abs(np.log(ts + eps) + eps)
    # den vanishes only at ts = exp(-eps) - eps; keep the map finite there
    den = np.maximum(den, num * np.finfo(np.float64).eps)
    return num / den


def crop_border(plane: np.ndarray, width: int) -> np.ndarray:
    if width == 0:
        return plane
    return plane[width:-width, width:-width]


def _channel_weighting(channel: np.ndarray, cfg: SharpnessConfig) -> np.ndarray:
    mh = mean_bias_removal(stimulus(channel, cfg), cfg.block)
    return weighted_channel(mh, local_std(channel, cfg.block), cfg)


def total_stimulus_map(img: InputImage, cfg: SharpnessConfig) -> np.ndarray:
    ycc = to_ycbcr(img)
    t_y = _channel_weighting(ycc.y, cfg)
    if img.kind is ImageKind.GRAY:
        return total_stimulus(t_y, None, None, 1, cfg)
    t_cb = _channel_weighting(ycc.cb, cfg)
    t_cr = _channel_weighting(ycc.cr, cfg)
    return total_stimulus(t_y, t_cb, t_cr, 3, cfg)


def maps_from_raw(s_map: np.ndarray, cfg: SharpnessConfig) -> SharpnessResult:
    """Crop, pool and localise an already computed raw map."""
    eps = cfg.epsilon
    bs_map = crop_border(s_map, cfg.border_width)
    if bs_map.size == 0:
        raise ValueError("border crop leaves an empty map")
    top = float(bs_map.max())
    gamma = (top + eps) / (float(bs_map.mean()) + eps)
    arg = np.minimum(gamma * block_median_overlap(bs_map, cfg.median_window), _MAX_EXP_ARG)
    return SharpnessResult(score=top, s_map=s_map, bs_map=bs_map, lbs_map=np.exp(arg), gamma=gamma)


def score_and_maps(img: InputImage, cfg: SharpnessConfig | None = None) -> SharpnessResult:
    """Sharpness score (higher is sharper) with its raw, cropped and localized maps."""
    cfg = cfg or SharpnessConfig()
    h, w = img.shape
    limit = 2 * cfg.border_width + 2
    if h <= limit or w <= limit:
        raise ValueError(
            f"image is {h}x{w}; both sides must exceed {limit} pixels "
            f"for a border of {cfg.border_width}"
        )
    s_map = raw_map(total_stimulus_map(img, cfg), cfg)
    return maps_from_raw(s_map, cfg)


def sharpness_score(img: InputImage, cfg: SharpnessConfig | None = None) -> float:
    return score_and_maps(img, cfg).score
