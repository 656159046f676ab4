"""Build a layered volume from a single RGBD frame by disparity binning.

Layer planes are spaced uniformly in disparity. Each depth pixel deposits its
color on the two planes bracketing its disparity, with compositing weights
split linearly by disparity distance, so rendering the volume back at its own
camera reproduces the frame (and its disparity) to within the layer
quantization.
"""

from __future__ import annotations

import logging

import numpy as np

from .frame import RgbdFrame
from .mpi import MpiLayer, MpiVolume
from .rendering import ray_deltas
from .scene import SceneSpec

logger = logging.getLogger(__name__)

# Opacity cap keeping log(1 - alpha) finite for fully opaque pixels.
_ALPHA_CAP = 1.0 - 1e-6

DEFAULT_Z_NEAR_FLOOR = 0.3
DEFAULT_Z_FAR_CEIL = 100.0


def depth_bounds_for_scene(scene: SceneSpec) -> tuple[float, float]:
    """Near/far binning planes from a scene's depth-range hint."""
    z_near = max(DEFAULT_Z_NEAR_FLOOR, scene.depth_range[0])
    z_far = min(DEFAULT_Z_FAR_CEIL, scene.depth_range[1])
    if not z_near < z_far:
        raise ValueError(f"degenerate depth bounds [{z_near}, {z_far}]")
    return z_near, z_far


def layer_depths_uniform_disparity(d: int, z_near: float, z_far: float) -> np.ndarray:
    """Plane depths whose disparities are evenly spaced on [1/z_far, 1/z_near]."""
    disparities = np.linspace(1.0 / z_near, 1.0 / z_far, d)
    return 1.0 / disparities


def mpi_from_rgbd(
    frame: RgbdFrame, d: int, z_near: float, z_far: float
) -> MpiVolume:
    """Construct a volume from one RGBD frame.

    Args:
        frame: Source view; sentinel-depth pixels contribute nothing.
        d: Layer count, at least 2.
        z_near: Depth of the closest plane, meters.
        z_far: Depth of the furthest plane, meters.

    Returns:
        A volume anchored at the frame's camera with scale 1. Depths outside
        [z_near, z_far] are clamped to the boundary plane (count logged).
    """
    if d < 2:
        raise ValueError(f"need at least 2 layers, got {d}")
    if not 0 < z_near < z_far:
        raise ValueError(f"need 0 < z_near < z_far, got {z_near}, {z_far}")

    h, w = frame.depth.shape
    disp_near = 1.0 / z_near
    disp_far = 1.0 / z_far
    step = (disp_near - disp_far) / (d - 1)
    depths = layer_depths_uniform_disparity(d, z_near, z_far)

    valid = frame.valid_mask
    depth = frame.depth.astype(np.float64)
    with np.errstate(divide="ignore"):
        disparity = np.where(valid, 1.0 / np.where(valid, depth, 1.0), 0.0)
    clamped = valid & ((disparity > disp_near) | (disparity < disp_far))
    n_clamped = int(clamped.sum())
    if n_clamped:
        logger.info("clamped %d/%d pixels outside depth range [%g, %g]",
                     n_clamped, int(valid.sum()), z_near, z_far)
    disparity = np.clip(disparity, disp_far, disp_near)

    # Continuous bin coordinate: 0 at the nearest plane, d-1 at the furthest.
    g = np.where(valid, (disp_near - disparity) / step, 0.0)
    front = np.minimum(g.astype(np.intp), d - 2)
    frac = g - front  # in [0, 1]; weight of the far plane

    alpha = np.zeros((d, h, w))
    color = np.zeros((d, h, w, 3), dtype=np.float32)
    yy, xx = np.nonzero(valid)
    fi = front[valid]
    f = frac[valid]
    rgb = frame.rgb[valid]

    alpha[fi, yy, xx] = np.minimum(1.0 - f, _ALPHA_CAP)
    color[fi, yy, xx] = rgb
    back = f > 0
    alpha[fi[back] + 1, yy[back], xx[back]] = _ALPHA_CAP
    color[fi[back] + 1, yy[back], xx[back]] = rgb[back]

    # Densities realizing these opacities at the frame's own view.
    deltas = ray_deltas(depths, frame.camera, frame.camera)
    sigma = -np.log1p(-alpha) / deltas

    layers = tuple(
        MpiLayer(color=color[i], density=sigma[i].astype(np.float32), depth=float(depths[i]))
        for i in range(d)
    )
    return MpiVolume(layers=layers, reference=frame.camera, scale=1.0)
