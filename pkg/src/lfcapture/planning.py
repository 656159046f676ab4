"""Minimum-view planner for grid capture, from plenoptic sampling limits.

Given the capture-area side, image width, layer count, minimum scene depth,
and field of view, the planner computes the minimum view count for alias-free
interpolation and lays out a camera grid at the implied spacing. This is the
fixed-annotation baseline the interactive error-driven loop replaces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .camera import CameraModel

PORTRAIT_WIDTH = 294
PORTRAIT_HEIGHT = 639


@dataclass(frozen=True)
class LlffPlan:
    """A planned capture grid.

    Attributes:
        side: Capture-area side length S, meters.
        width: Image width in pixels.
        layer_count: Number of reconstruction layers D.
        z_min: Minimum scene depth, meters.
        theta: Horizontal field of view, radians.
        view_count: Minimum view count N (not rounded).
        interval: Camera interval S / sqrt(N), meters.
        poses: Planned camera grid.
    """

    side: float
    width: int
    layer_count: int
    z_min: float
    theta: float
    view_count: float
    interval: float
    poses: tuple[CameraModel, ...]

    def to_json(self) -> dict:
        return {
            "side": self.side,
            "width": self.width,
            "layer_count": self.layer_count,
            "z_min": self.z_min,
            "theta": self.theta,
            "view_count": self.view_count,
            "interval": self.interval,
            "grid_points": len(self.poses),
            "centers": [p.translation.tolist() for p in self.poses],
        }


def minimum_view_count(side: float, width: int, layer_count: int, z_min: float, theta: float) -> float:
    """Minimum number of views: ``(S W / (2 D z_min tan(theta / 2)))^2``."""
    return (side * width / (2.0 * layer_count * z_min * math.tan(theta / 2.0))) ** 2


def llff_plan(
    side: float,
    width: int,
    layer_count: int,
    z_min: float,
    theta: float,
    height: int | None = None,
    base_camera: CameraModel | None = None,
    grid: str = "square",
) -> LlffPlan:
    """Plan a capture grid over an S-by-S fronto-parallel area.

    Args:
        side: Capture-area side length, meters.
        width: Image width, pixels.
        layer_count: Reconstruction layer count.
        z_min: Minimum scene depth, meters.
        theta: Horizontal field of view, radians.
        height: Image height; defaults to the portrait aspect of the width.
        base_camera: Grid center pose and intrinsics source; defaults to a
            camera at the origin built from ``theta`` and the resolution.
        grid: "square" for a ceil(sqrt(N))-squared grid, "count" to truncate
            the same layout to ceil(N) poses.

    Raises:
        ValueError: On non-positive arguments or an unknown grid mode.
    """
    if min(side, width, layer_count, z_min, theta) <= 0:
        raise ValueError("all plan arguments must be positive")
    if grid not in ("square", "count"):
        raise ValueError(f"unknown grid mode {grid!r}")

    n = minimum_view_count(side, width, layer_count, z_min, theta)
    interval = side / math.sqrt(n)

    if base_camera is None:
        if height is None:
            height = round(width * PORTRAIT_HEIGHT / PORTRAIT_WIDTH)
        base_camera = CameraModel.from_fov(theta, width, height)

    per_side = math.ceil(math.sqrt(n))
    offsets = (np.arange(per_side) - (per_side - 1) / 2.0) * interval
    centers = []
    for dy in offsets:
        for dx in offsets:
            centers.append(base_camera.translation + base_camera.rotation @ np.array([dx, dy, 0.0]))
    if grid == "count":
        centers = centers[: math.ceil(n)]
    poses = tuple(base_camera.moved_to(c) for c in centers)
    return LlffPlan(
        side=side,
        width=width,
        layer_count=layer_count,
        z_min=z_min,
        theta=theta,
        view_count=n,
        interval=interval,
        poses=poses,
    )
