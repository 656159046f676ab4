"""Ready-made scenes, cameras, and trajectories for demos and evaluation.

The default camera mirrors a phone held in portrait: 294x639 pixels with a
45.93 degree horizontal field of view. Scene depths span roughly 0.5 m to
3.0 m, with near content entering the frame from the left.
"""

from __future__ import annotations

import math

import numpy as np

from .camera import CameraModel
from .scene import (
    BoxPrimitive,
    GradientTexture,
    PlaidTexture,
    RectanglePrimitive,
    SceneSpec,
    Trajectory,
    line_trajectory,
)

PORTRAIT_WIDTH = 294
PORTRAIT_HEIGHT = 639
HORIZONTAL_FOV_DEG = 45.93


def default_camera(
    width: int = PORTRAIT_WIDTH,
    height: int = PORTRAIT_HEIGHT,
    fov_deg: float = HORIZONTAL_FOV_DEG,
) -> CameraModel:
    """Portrait capture camera at the world origin, looking down +z."""
    return CameraModel.from_fov(math.radians(fov_deg), width, height)


def single_plane_scene() -> SceneSpec:
    """One big textured wall at 2 m; a single capture reconstructs it exactly."""
    wall = RectanglePrimitive(
        size=(6.0, 9.0),
        texture=PlaidTexture(
            color_a=(0.2, 0.3, 0.6), color_b=(0.9, 0.8, 0.4), cycles_u=4.0, cycles_v=6.0
        ),
        translation=np.array([0.0, 0.0, 2.0]),
    )
    return SceneSpec(
        primitives=(wall,),
        background=(0.0, 0.0, 0.0),
        depth_range=(1.8, 2.2),
        name="single-plane",
    )


def varying_depth_scene(variant: int = 0) -> SceneSpec:
    """Office-like arrangement with depths from about 0.5 m to 3.0 m.

    The nearest panel sits left of center, so it enters the view as the
    camera slides left along the usual trajectories. Variants shuffle
    placement and texture so multi-scene evaluations do not share geometry.
    """
    rng = np.random.default_rng(2024 + variant)
    shift = float(rng.uniform(-0.05, 0.05))

    backdrop = RectanglePrimitive(
        size=(7.0, 9.0),
        texture=PlaidTexture(
            color_a=(0.15, 0.2, 0.45),
            color_b=(0.85, 0.8, 0.55),
            cycles_u=5.0 + variant,
            cycles_v=7.0,
            phase=0.13 * variant,
        ),
        translation=np.array([0.0, 0.0, 3.0]),
    )
    near_panel = RectanglePrimitive(
        size=(0.13, 0.22),
        texture=GradientTexture(
            color_a=(0.8, 0.25, 0.2), color_b=(0.95, 0.7, 0.3), v_weight=0.4
        ),
        translation=np.array([-0.16 + shift, -0.03, 0.52]),
    )
    mid_panel = RectanglePrimitive(
        size=(0.4, 0.6),
        texture=PlaidTexture(
            color_a=(0.2, 0.55, 0.3),
            color_b=(0.75, 0.9, 0.6),
            cycles_u=3.0,
            cycles_v=4.0,
            phase=0.31 * (variant + 1),
        ),
        translation=np.array([0.35 - shift, 0.1, 1.4 + 0.1 * variant]),
    )
    crate = BoxPrimitive(
        size=(0.5, 0.4, 0.4),
        texture=GradientTexture(
            color_a=(0.45, 0.35, 0.7), color_b=(0.9, 0.85, 0.75), v_weight=0.2
        ),
        translation=np.array([0.05 + shift, 0.55, 2.0 - 0.15 * variant]),
    )
    return SceneSpec(
        primitives=(backdrop, near_panel, mid_panel, crate),
        background=(0.0, 0.0, 0.0),
        depth_range=(0.5, 3.0),
        name=f"varying-depth-{variant}",
    )


def scene_catalog() -> dict[str, SceneSpec]:
    return {
        "single-plane": single_plane_scene(),
        "varying-depth-0": varying_depth_scene(0),
        "varying-depth-1": varying_depth_scene(1),
        "varying-depth-2": varying_depth_scene(2),
    }


def sweep_trajectory(
    camera: CameraModel | None = None, span: float = 0.15, count: int = 25
) -> Trajectory:
    """Horizontal sweep centered on the camera's start pose.

    ``span`` mirrors the side length of a typical capture area; the default
    matches the planner examples.
    """
    camera = camera or default_camera()
    half = span / 2.0
    start = camera.translation + camera.rotation @ np.array([-half, 0.0, 0.0])
    stop = camera.translation + camera.rotation @ np.array([half, 0.0, 0.0])
    return line_trajectory(camera, start, stop, count)
