"""Layered scene representation: RGB + density planes anchored at a reference camera."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .camera import CameraModel
from .errors import DimensionMismatchError, InvariantViolation

DEFAULT_LAYER_COUNT = 32


@dataclass(frozen=True)
class MpiLayer:
    """One fronto-parallel plane of the volume.

    Attributes:
        color: (H, W, 3) RGB in [0, 1].
        density: (H, W) non-negative volumetric density; opacity at a view
            follows from the along-ray distance to the next plane.
        depth: Plane distance from the reference camera along its optical
            axis, meters, > 0.
    """

    color: np.ndarray
    density: np.ndarray
    depth: float

    def __post_init__(self) -> None:
        color = np.asarray(self.color, dtype=np.float32)
        density = np.asarray(self.density, dtype=np.float32)
        object.__setattr__(self, "color", color)
        object.__setattr__(self, "density", density)
        if color.ndim != 3 or color.shape[2] != 3:
            raise DimensionMismatchError(f"layer color must be (H, W, 3), got {color.shape}")
        if density.shape != color.shape[:2]:
            raise DimensionMismatchError(
                f"layer density shape {density.shape} does not match color {color.shape[:2]}"
            )
        if self.depth <= 0:
            raise InvariantViolation(f"layer depth must be positive, got {self.depth}")
        if np.any(density < 0):
            raise InvariantViolation("layer density must be non-negative")


@dataclass(frozen=True)
class MpiVolume:
    """A stack of layers ordered near to far, plus the capture pose and metric scale.

    ``scale`` records the metric scale factor already applied to the layer
    depths (1.0 for an unscaled volume).
    """

    layers: tuple[MpiLayer, ...]
    reference: CameraModel
    scale: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "layers", tuple(self.layers))
        if len(self.layers) < 1:
            raise InvariantViolation("a volume needs at least one layer")
        depths = self.layer_depths
        if np.any(np.diff(depths) <= 0):
            raise InvariantViolation("layer depths must be strictly increasing near to far")
        h, w = self.reference.height, self.reference.width
        for i, layer in enumerate(self.layers):
            if layer.color.shape[:2] != (h, w):
                raise DimensionMismatchError(
                    f"layer {i} resolution {layer.color.shape[:2]} does not match "
                    f"reference camera {w}x{h}"
                )

    @property
    def layer_depths(self) -> np.ndarray:
        return np.array([layer.depth for layer in self.layers])

    @property
    def layer_count(self) -> int:
        return len(self.layers)


@dataclass(frozen=True)
class RenderedView:
    """Result of rendering a volume (or blend of volumes) at a camera.

    ``color`` and ``disparity`` are alpha-premultiplied accumulations;
    ``disparity`` composites the per-layer inverse depths with the color
    weights and is what metric-scale estimation consumes.
    """

    color: np.ndarray
    alpha: np.ndarray
    disparity: np.ndarray | None = None

    def __post_init__(self) -> None:
        color = np.asarray(self.color)
        alpha = np.asarray(self.alpha)
        object.__setattr__(self, "color", color)
        object.__setattr__(self, "alpha", alpha)
        if alpha.shape != color.shape[:2]:
            raise DimensionMismatchError(
                f"alpha shape {alpha.shape} does not match color {color.shape[:2]}"
            )
        if self.disparity is not None:
            disparity = np.asarray(self.disparity)
            object.__setattr__(self, "disparity", disparity)
            if disparity.shape != alpha.shape:
                raise DimensionMismatchError(
                    f"disparity shape {disparity.shape} does not match alpha {alpha.shape}"
                )
        if np.any(alpha < -1e-6) or np.any(alpha > 1 + 1e-6):
            raise InvariantViolation("rendered alpha must lie in [0, 1]")


@dataclass(frozen=True)
class WarpedStack:
    """Per-layer images of a volume resampled at a target view.

    Attributes:
        colors: (D, H, W, 3) layer colors at the target.
        densities: (D, H, W) layer densities at the target; 0 where the
            layer plane is invisible from the target pixel.
        deltas: (D, H, W) along-ray distances between consecutive plane
            intersections; the last layer reuses the previous spacing.
    """

    colors: np.ndarray
    densities: np.ndarray
    deltas: np.ndarray

    def __post_init__(self) -> None:
        if self.colors.ndim != 4 or self.colors.shape[3] != 3:
            raise DimensionMismatchError(f"stack colors must be (D, H, W, 3), got {self.colors.shape}")
        if self.densities.shape != self.colors.shape[:3]:
            raise DimensionMismatchError(
                f"stack densities {self.densities.shape} do not match colors {self.colors.shape[:3]}"
            )
        if self.deltas.shape != self.densities.shape:
            raise DimensionMismatchError(
                f"stack deltas {self.deltas.shape} do not match densities {self.densities.shape}"
            )
        if np.any(self.densities < 0):
            raise InvariantViolation("stack densities must be non-negative")

    @property
    def layer_count(self) -> int:
        return self.colors.shape[0]
