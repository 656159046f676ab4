"""Single-view capture data: an RGB image paired with a metric depth map."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .camera import CameraModel
from .errors import DimensionMismatchError, InvariantViolation

# Depth value marking rays that hit nothing. Matches the on-disk convention
# (16-bit millimeter PNG, 0 = no hit).
DEPTH_SENTINEL = 0.0


@dataclass(frozen=True)
class RgbdFrame:
    """One captured view: RGB in [0, 1], metric depth in meters, and its camera.

    Depth holds camera-frame z distances (not ray lengths); pixels whose ray
    hit nothing carry ``DEPTH_SENTINEL``.
    """

    rgb: np.ndarray
    depth: np.ndarray
    camera: CameraModel

    def __post_init__(self) -> None:
        rgb = np.asarray(self.rgb, dtype=np.float32)
        depth = np.asarray(self.depth, dtype=np.float32)
        object.__setattr__(self, "rgb", rgb)
        object.__setattr__(self, "depth", depth)
        h, w = self.camera.height, self.camera.width
        if rgb.shape != (h, w, 3):
            raise DimensionMismatchError(
                f"rgb shape {rgb.shape} does not match camera resolution {w}x{h}"
            )
        if depth.shape != (h, w):
            raise DimensionMismatchError(
                f"depth shape {depth.shape} does not match camera resolution {w}x{h}"
            )
        hits = depth != DEPTH_SENTINEL
        if np.any(depth[hits] <= 0):
            raise InvariantViolation("non-sentinel depth values must be positive")

    @property
    def valid_mask(self) -> np.ndarray:
        """Boolean mask of pixels with a real depth sample."""
        return self.depth != DEPTH_SENTINEL
