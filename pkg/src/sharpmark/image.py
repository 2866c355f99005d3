"""Image loading, plane containers and colour conversion.

A plane is a 2-D ``float64`` numpy array.  Channel data lives in [0, 1];
filtered or derived planes may leave that range.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import cv2
import numpy as np

_MAX_VALUE = {np.dtype(np.uint8): 255.0, np.dtype(np.uint16): 65535.0}


class ImageLoadError(ValueError):
    """Raised when a raster cannot be read or has an unsupported layout."""


class ImageKind(str, Enum):
    RGB = "rgb"
    GRAY = "gray"


def as_plane(values) -> np.ndarray:
    """Validate ``values`` as a finite, non-empty 2-D plane; returns a float64 copy."""
    plane = np.array(values, dtype=np.float64)
    if plane.ndim != 2 or plane.shape[0] < 1 or plane.shape[1] < 1:
        raise ValueError(f"a plane must be a non-empty 2-D array, got shape {plane.shape}")
    if not np.all(np.isfinite(plane)):
        raise ValueError("plane contains NaN or Inf")
    return plane


def _frozen(plane: np.ndarray) -> np.ndarray:
    plane.flags.writeable = False
    return plane


@dataclass(frozen=True)
class InputImage:
    """An RGB or grayscale image with samples scaled to [0, 1]."""

    kind: ImageKind
    planes: tuple[np.ndarray, ...]

    def __post_init__(self):
        kind = ImageKind(self.kind)
        expected = 3 if kind is ImageKind.RGB else 1
        if len(self.planes) != expected:
            raise ValueError(f"{kind.value} image needs {expected} planes, got {len(self.planes)}")
        planes = tuple(_frozen(as_plane(p)) for p in self.planes)
        if len({p.shape for p in planes}) != 1:
            raise ValueError("all planes must share one shape")
        for p in planes:
            if p.min() < 0.0 or p.max() > 1.0:
                raise ValueError("input samples must lie in [0, 1]")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "planes", planes)

    @classmethod
    def gray(cls, plane) -> "InputImage":
        return cls(ImageKind.GRAY, (plane,))

    @classmethod
    def rgb(cls, r, g, b) -> "InputImage":
        return cls(ImageKind.RGB, (r, g, b))

    @classmethod
    def from_array(cls, array) -> "InputImage":
        """Build from an ``(H, W)`` or ``(H, W, 3)`` float array in [0, 1]."""
        array = np.asarray(array, dtype=np.float64)
        if array.ndim == 2:
            return cls.gray(array)
        if array.ndim == 3 and array.shape[2] == 3:
            return cls.rgb(array[..., 0], array[..., 1], array[..., 2])
        raise ValueError(f"cannot interpret array of shape {array.shape} as an image")

    @property
    def shape(self) -> tuple[int, int]:
        return self.planes[0].shape

    @property
    def channel_count(self) -> int:
        return len(self.planes)

    def map_planes(self, fn) -> "InputImage":
        """Apply ``fn`` to each plane, keeping the kind."""
        return InputImage(self.kind, tuple(fn(p) for p in self.planes))


@dataclass(frozen=True)
class YCbCrImage:
    y: np.ndarray
    cb: np.ndarray
    cr: np.ndarray

    def __post_init__(self):
        planes = [_frozen(as_plane(p)) for p in (self.y, self.cb, self.cr)]
        if len({p.shape for p in planes}) != 1:
            raise ValueError("Y, Cb and Cr planes must share one shape")
        for name, p in zip(("y", "cb", "cr"), planes):
            object.__setattr__(self, name, p)


def load_image(path: str | os.PathLike) -> InputImage:
    """Read an 8- or 16-bit gray or RGB raster (PNG, PGM/PPM, ...).

    Samples are divided by the container maximum (255 or 65535).  Alpha
    channels are dropped.
    """
    path = Path(path)
    try:
        data = np.fromfile(path, dtype=np.uint8)
    except OSError as exc:
        raise ImageLoadError(f"cannot read {path}: {exc.strerror or exc}") from exc
    if data.size == 0:
        raise ImageLoadError(f"cannot read {path}: file is empty")
    raw = cv2.imdecode(data, cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise ImageLoadError(f"cannot decode {path}: unsupported or corrupt raster")
    if raw.dtype not in _MAX_VALUE:
        raise ImageLoadError(f"{path}: unsupported sample type {raw.dtype} (need 8 or 16 bit)")
    scaled = raw.astype(np.float64) / _MAX_VALUE[raw.dtype]

    if scaled.ndim == 2:
        return InputImage.gray(scaled)
    channels = scaled.shape[2]
    if channels == 1:
        return InputImage.gray(scaled[..., 0])
    if channels == 2:  # gray + alpha
        return InputImage.gray(scaled[..., 0])
    if channels in (3, 4):
        # OpenCV decodes to BGR(A)
        return InputImage.rgb(scaled[..., 2], scaled[..., 1], scaled[..., 0])
    raise ImageLoadError(f"{path}: unsupported channel count {channels}")


def save_image(path: str | os.PathLike, image: InputImage, bit_depth: int = 8) -> None:
    """Write ``image`` losslessly; the format follows the file suffix."""
    if bit_depth not in (8, 16):
        raise ValueError("bit_depth must be 8 or 16")
    dtype, top = (np.uint8, 255.0) if bit_depth == 8 else (np.uint16, 65535.0)
    if image.kind is ImageKind.GRAY:
        stacked = image.planes[0]
    else:
        r, g, b = image.planes
        stacked = np.dstack([b, g, r])
    quantized = np.floor(stacked * top + 0.5).astype(dtype)
    path = Path(path)
    ok, buf = cv2.imencode(path.suffix or ".png", quantized)
    if not ok:
        raise ValueError(f"cannot encode image as {path.suffix!r}")
    buf.tofile(path)


def to_ycbcr(image: InputImage) -> YCbCrImage:
    """Full-range BT.601 YCbCr with chroma offset by 0.5.

    Gray images keep their plane as luma and get constant 0.5 chroma.
    """
    if image.kind is ImageKind.GRAY:
        y = image.planes[0]
        neutral = np.full(y.shape, 0.5)
        return YCbCrImage(y.copy(), neutral, neutral.copy())
    r, g, b = image.planes
    y = 0.299 * r + 0.587 * g + 0.114 * b
    cb = 0.5 - 0.168736 * r - 0.331264 * g + 0.5 * b
    cr = 0.5 + 0.5 * r - 0.418688 * g - 0.081312 * b
    return YCbCrImage(y, cb, cr)


def normalize_to_u8(plane: np.ndarray) -> np.ndarray:
    """Min-max stretch to 0..255; a constant plane maps to all zeros."""
    plane = np.asarray(plane, dtype=np.float64)
    lo, hi = plane.min(), plane.max()
    if hi == lo:
        return np.zeros(plane.shape, dtype=np.uint8)
    return np.floor(255.0 * (plane - lo) / (hi - lo) + 0.5).astype(np.uint8)


def write_pgm(path: str | os.PathLike, plane: np.ndarray) -> None:
    """Write a plane as a binary 8-bit PGM after min-max normalisation."""
    pixels = normalize_to_u8(plane)
    h, w = pixels.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(pixels.tobytes())
