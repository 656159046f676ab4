"""Metric scale alignment between rendered disparity and a measured depth map."""

from __future__ import annotations

import logging
import warnings
from dataclasses import replace

import numpy as np

from .errors import DimensionMismatchError, InvalidScaleError, ScaleUndefinedError
from .frame import DEPTH_SENTINEL
from .mpi import MpiLayer, MpiVolume

logger = logging.getLogger(__name__)

# Above this fraction of dropped (non-positive disparity) pixels the scale
# estimate is suspect and a warning is attached.
_EXCLUDED_WARN_FRACTION = 0.5


class ScaleEstimateWarning(UserWarning):
    """More than half the candidate pixels were unusable for scale estimation."""


def compute_scale(metric_depth: np.ndarray, rendered_disparity: np.ndarray) -> float:
    """Scale factor aligning a volume's depth axis with a metric depth map.

    The factor is the geometric mean, over usable pixels, of the product of
    rendered disparity and measured depth:
    ``s = exp(mean(ln(disparity) + ln(depth)))``. Pixels with sentinel depth
    or non-positive rendered disparity are excluded.

    Args:
        metric_depth: (H, W) depth in meters; sentinel marks no measurement.
        rendered_disparity: (H, W) rendered inverse depth of the volume.

    Returns:
        The scale factor s to apply to the volume's layer depths.

    Raises:
        DimensionMismatchError: If the two maps differ in shape.
        ScaleUndefinedError: If no pixel is usable.
    """
    depth = np.asarray(metric_depth, dtype=np.float64)
    disp = np.asarray(rendered_disparity, dtype=np.float64)
    if depth.shape != disp.shape:
        raise DimensionMismatchError(
            f"depth shape {depth.shape} does not match disparity shape {disp.shape}"
        )
    measured = depth != DEPTH_SENTINEL
    usable = measured & (disp > 0)
    n_measured = int(measured.sum())
    n_usable = int(usable.sum())
    if n_usable == 0:
        raise ScaleUndefinedError("no pixel has both a depth measurement and positive disparity")
    if n_measured > 0:
        excluded = 1.0 - n_usable / n_measured
        if excluded > _EXCLUDED_WARN_FRACTION:
            warnings.warn(
                f"scale estimated from {n_usable}/{n_measured} pixels "
                f"({excluded:.0%} excluded for non-positive disparity)",
                ScaleEstimateWarning,
                stacklevel=2,
            )
    log_ratio = np.log(disp[usable]) + np.log(depth[usable])
    return float(np.exp(log_ratio.mean()))


def rescale_mpi(mpi: MpiVolume, s: float) -> MpiVolume:
    """Apply a metric scale factor to a volume.

    Layer depths multiply by ``s`` and densities divide by ``s`` so that each
    layer keeps its opacity at the reference view (the inter-plane ray
    distances scale with the depths). Pixel grids are untouched; plane
    extents are derived quantities and follow the new depths. The volume's
    recorded scale multiplies by ``s``.

    Raises:
        InvalidScaleError: If ``s`` is not strictly positive.
    """
    if s <= 0:
        raise InvalidScaleError(f"scale factor must be positive, got {s}")
    layers = tuple(
        MpiLayer(color=layer.color, density=layer.density / s, depth=layer.depth * s)
        for layer in mpi.layers
    )
    logger.debug("rescaled volume by %.6g (total scale %.6g)", s, mpi.scale * s)
    return replace(mpi, layers=layers, scale=mpi.scale * s)
