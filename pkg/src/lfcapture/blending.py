"""Distance-weighted blending of the nearest registered volumes.

Rendering always blends the K volumes whose capture positions are closest to
the requested camera, which suppresses popping when the nearest volume
changes along a camera path.
"""

from __future__ import annotations

import numpy as np

from .camera import CameraModel
from .errors import DimensionMismatchError, EmptySessionError
from .mpi import MpiVolume, RenderedView

DEFAULT_BLEND_COUNT = 3


def select_k_nearest(
    mpis: list[MpiVolume] | tuple[MpiVolume, ...],
    target: CameraModel,
    k: int = DEFAULT_BLEND_COUNT,
) -> tuple[list[int], np.ndarray, float]:
    """Pick the volumes closest to the target camera center.

    Distance is Euclidean between camera centers only; orientation does not
    participate. Ties resolve to the earlier capture index.

    Returns:
        indices: min(k, len(mpis)) volume indices, nearest first.
        distances: matching distances in meters.
        gamma: the largest returned distance (the blend falloff scale).

    Raises:
        EmptySessionError: If no volumes are registered.
    """
    if len(mpis) == 0:
        raise EmptySessionError("no volumes registered; capture one first")
    centers = np.stack([m.reference.translation for m in mpis])
    dists = np.linalg.norm(centers - target.translation, axis=1)
    order = np.lexsort((np.arange(len(mpis)), dists))[: max(k, 0)]
    distances = dists[order]
    gamma = float(distances.max()) if len(distances) else 0.0
    return list(int(i) for i in order), distances, gamma


def blend_weights(distances: np.ndarray, gamma: float) -> np.ndarray:
    """Normalized exponential falloff weights, exp(-l / gamma) / sum.

    A zero gamma means every volume sits at the target; weights are equal.
    """
    distances = np.asarray(distances, dtype=np.float64)
    if gamma <= 0.0:
        return np.full(len(distances), 1.0 / len(distances))
    w = np.exp(-distances / gamma)
    return w / w.sum()


def blend_renders(
    renders: list[RenderedView] | tuple[RenderedView, ...],
    distances: np.ndarray,
    gamma: float,
) -> RenderedView:
    """Blend per-volume renders into one view.

    Colors mix as an alpha-weighted average, ``sum(w * a * c) / sum(w * a)``,
    with zero output where no volume contributes; the blended alpha is
    ``min(sum(w * a), 1)``. Disparity blends like color when every input
    carries it.

    Raises:
        ValueError: If no renders are given.
        DimensionMismatchError: If render resolutions differ.
    """
    if len(renders) == 0:
        raise ValueError("blend needs at least one render")
    if len(renders) != len(distances):
        raise ValueError(f"{len(renders)} renders but {len(distances)} distances")
    shape = renders[0].alpha.shape
    for r in renders[1:]:
        if r.alpha.shape != shape:
            raise DimensionMismatchError(
                f"render resolutions differ: {r.alpha.shape} vs {shape}"
            )

    w = blend_weights(distances, gamma)
    weighted_alpha = np.stack([wk * r.alpha for wk, r in zip(w, renders)])
    denom = weighted_alpha.sum(axis=0)
    color_num = sum(
        wa[..., None] * r.color for wa, r in zip(weighted_alpha, renders)
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        color = np.where(denom[..., None] > 0, color_num / denom[..., None], 0.0)
    alpha = np.minimum(denom, 1.0)

    disparity = None
    if all(r.disparity is not None for r in renders):
        disp_num = sum(wa * r.disparity for wa, r in zip(weighted_alpha, renders))
        with np.errstate(divide="ignore", invalid="ignore"):
            disparity = np.where(denom > 0, disp_num / denom, 0.0).astype(np.float32)
    return RenderedView(
        color=color.astype(np.float32),
        alpha=alpha.astype(np.float32),
        disparity=disparity,
    )


def render_blend(
    mpis: list[MpiVolume] | tuple[MpiVolume, ...],
    target: CameraModel,
    k: int = DEFAULT_BLEND_COUNT,
) -> RenderedView:
    """Render the K-nearest blend at a target camera."""
    from .rendering import render

    indices, distances, gamma = select_k_nearest(mpis, target, k)
    renders = [render(mpis[i], target) for i in indices]
    return blend_renders(renders, distances, gamma)
