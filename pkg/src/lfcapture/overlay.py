"""Error-peaking overlays: the three visualization modes shown during capture.

The capture display never shows the raw scene once reconstruction starts:
either the reconstruction is composited over black, or pixels whose
reconstruction disagrees with the live view beyond a threshold are painted in
a highlight color, over the live view or over the reconstruction itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DimensionMismatchError, InvariantViolation
from .mpi import RenderedView

DEFAULT_ERROR_THRESHOLD = 0.4


class VisualizationMode(str, Enum):
    RAW = "RAW"
    BLACK_BG = "BLACK_BG"
    ERROR_ON_VIDEO = "ERROR_ON_VIDEO"
    ERROR_ON_MPI = "ERROR_ON_MPI"


@dataclass(frozen=True)
class OverlayConfig:
    """Parameters of the error-peaking display.

    ``threshold`` applies to the per-pixel color distance: the sum of absolute
    RGB differences by default (range [0, 3]), or its mean over channels when
    ``channel_mean`` is set.
    """

    mode: VisualizationMode = VisualizationMode.BLACK_BG
    error_color: tuple[float, float, float] = (1.0, 0.0, 0.0)
    threshold: float = DEFAULT_ERROR_THRESHOLD
    background: tuple[float, float, float] = (0.0, 0.0, 0.0)
    channel_mean: bool = False

    def __post_init__(self) -> None:
        if self.threshold <= 0:
            raise InvariantViolation(f"threshold must be positive, got {self.threshold}")


def overlay_black(view: RenderedView, background: tuple[float, float, float] = (0.0, 0.0, 0.0)) -> np.ndarray:
    """Composite a rendered view over a uniform background (black by default)."""
    bg = np.asarray(background, dtype=view.color.dtype)
    a = view.alpha[..., None]
    return a * view.color + (1.0 - a) * bg


def error_mask(
    c_mpi: np.ndarray,
    c_vid: np.ndarray,
    threshold: float = DEFAULT_ERROR_THRESHOLD,
    channel_mean: bool = False,
) -> tuple[np.ndarray, float]:
    """Pixels where two images disagree beyond a threshold.

    The distance is the L1 sum of per-channel absolute differences (mean over
    channels when ``channel_mean``). The error rate counts masked pixels over
    all pixels in the viewport.

    Returns:
        (mask, error_rate) with ``mask`` boolean (H, W).

    Raises:
        DimensionMismatchError: If the images differ in shape.
    """
    a = np.asarray(c_mpi)
    b = np.asarray(c_vid)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"image shapes differ: {a.shape} vs {b.shape}")
    dist = np.abs(a.astype(np.float64) - b.astype(np.float64)).sum(axis=-1)
    if channel_mean:
        dist /= a.shape[-1]
    mask = dist > threshold
    return mask, float(mask.mean())


def error_peak_video(
    c_mpi: np.ndarray, c_vid: np.ndarray, config: OverlayConfig
) -> np.ndarray:
    """Highlight disagreeing pixels over the live view."""
    mask, _ = error_mask(c_mpi, c_vid, config.threshold, config.channel_mean)
    out = np.array(c_vid, dtype=np.float32, copy=True)
    out[mask] = config.error_color
    return out


def error_peak_mpi(
    view: RenderedView, c_vid: np.ndarray, config: OverlayConfig
) -> np.ndarray:
    """Highlight disagreeing pixels over the reconstruction itself.

    The live view contributes only to the mask; every displayed pixel is
    either the highlight color or the reconstruction on the background.
    """
    mask, _ = error_mask(view.color, c_vid, config.threshold, config.channel_mean)
    out = overlay_black(view, config.background).astype(np.float32)
    out[mask] = config.error_color
    return out
