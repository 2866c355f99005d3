"""No-reference perceptual sharpness from contrast-weighted high-frequency content."""
from .image import InputImage, YCbCrImage, load_image, to_ycbcr
from .sharpness import Backend, SharpnessConfig, SharpnessResult, score_and_maps, sharpness_score

__all__ = [
    "Backend",
    "InputImage",
    "SharpnessConfig",
    "SharpnessResult",
    "YCbCrImage",
    "load_image",
    "score_and_maps",
    "sharpness_score",
    "to_ycbcr",
]
__version__ = "0.1.0"
