"""Novel-view rendering of layered volumes: plane warping and front-to-back compositing."""

from __future__ import annotations

import numpy as np

from .camera import CameraModel
from .mpi import MpiLayer, MpiVolume, RenderedView, WarpedStack

# Rays closer to parallel with a layer plane than this never intersect it
# meaningfully; their samples are dropped as transparent.
_DENOM_EPS = 1e-12

# Slack on the in-image bounds test, absorbing coordinate rounding so exact
# border samples (identity warps) stay valid.
_BOUNDS_EPS = 1e-6


def bilinear_sample(image: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Bilinear resampling with a transparent (zero) border.

    Args:
        image: Source array (H, W) or (H, W, C).
        xs: Sample x coordinates in source pixel space, any shape.
        ys: Sample y coordinates, same shape as ``xs``.

    Returns:
        Samples with shape ``xs.shape`` (+ channel axis), in the image's
        float dtype. Coordinates outside the source fade to zero over one
        pixel and are zero beyond that.
    """
    squeeze = image.ndim == 2
    if squeeze:
        image = image[..., None]
    h, w, c = image.shape
    dtype = image.dtype if image.dtype in (np.float32, np.float64) else np.float64
    padded = np.zeros((h + 2, w + 2, c), dtype=dtype)
    padded[1:-1, 1:-1] = image

    shape = np.shape(xs)
    # Shift into padded coordinates; clipped values land on the zero border.
    xp = np.clip(np.asarray(xs, dtype=dtype).ravel(), -1.0, w) + 1.0
    yp = np.clip(np.asarray(ys, dtype=dtype).ravel(), -1.0, h) + 1.0
    x0 = np.minimum(xp.astype(np.intp), w)
    y0 = np.minimum(yp.astype(np.intp), h)
    fx = (xp - x0).astype(dtype)[:, None]
    fy = (yp - y0).astype(dtype)[:, None]

    flat = padded.reshape(-1, c)
    idx = y0 * (w + 2) + x0
    top = flat[idx] * (1 - fx) + flat[idx + 1] * fx
    bottom = flat[idx + w + 2] * (1 - fx) + flat[idx + w + 3] * fx
    out = (top * (1 - fy) + bottom * fy).reshape(*shape, c)
    return out[..., 0] if squeeze else out


def _target_rays_in_source(
    source: CameraModel, target: CameraModel
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Target pixel rays expressed in the source camera frame.

    Returns:
        rd: (H, W, 3) ray directions in source camera coordinates.
        t: (3,) target camera center in source camera coordinates.
        ray_norm: (H, W) length of each target ray direction (z component 1
            in the target frame), converting plane-depth spans to along-ray
            distances.
    """
    rel_rot = source.rotation.T @ target.rotation
    t = source.rotation.T @ (target.translation - source.translation)
    d = target.pixel_directions()
    rd = d @ rel_rot.T
    ray_norm = np.linalg.norm(d, axis=-1)
    return rd, t, ray_norm


def _plane_sample_coords(
    depth: float, rd: np.ndarray, t: np.ndarray, source: CameraModel
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Source-pixel sampling coordinates for one plane seen from the target.

    The plane sits fronto-parallel at ``depth`` in the source frame. Returns
    (xs, ys, valid); ``valid`` is False where the plane lies behind the
    target camera, the ray never crosses it, or the sample leaves the source
    image. Out-of-image samples are fully transparent rather than fading
    through the border, so coverage edges stay consistent across volumes.
    """
    denom = rd[..., 2]
    safe = np.where(np.abs(denom) < _DENOM_EPS, _DENOM_EPS, denom)
    lam = (depth - t[2]) / safe
    valid = (lam > 0) & (np.abs(denom) >= _DENOM_EPS)
    x = lam * rd[..., 0] + t[0]
    y = lam * rd[..., 1] + t[1]
    # The intersection point has z == depth in the source frame by construction.
    xs = source.f * x / depth + source.cx
    ys = source.f * y / depth + source.cy
    valid &= (
        (xs >= -_BOUNDS_EPS)
        & (xs <= source.width - 1 + _BOUNDS_EPS)
        & (ys >= -_BOUNDS_EPS)
        & (ys <= source.height - 1 + _BOUNDS_EPS)
    )
    return xs, ys, valid


def ray_deltas(
    depths: np.ndarray, source: CameraModel, target: CameraModel
) -> np.ndarray:
    """Per-pixel along-ray spacing between consecutive layer planes.

    For layer i the spacing is the distance, along each target pixel ray,
    from its intersection with plane i to its intersection with plane i+1.
    The last layer reuses the previous spacing; a single-layer volume uses
    the ray distance from the camera to its one plane.

    Returns:
        (D, H, W) non-negative distances in meters.
    """
    depths = np.asarray(depths, dtype=np.float64)
    rd, t, ray_norm = _target_rays_in_source(source, target)
    denom = rd[..., 2]
    safe = np.where(np.abs(denom) < _DENOM_EPS, _DENOM_EPS, denom)
    inv = (ray_norm / safe).astype(np.float32)

    d = len(depths)
    deltas = np.empty((d, *denom.shape), dtype=np.float32)
    if d == 1:
        deltas[0] = np.clip(np.float32(depths[0] - t[2]) * inv, 0.0, None)
        return deltas
    spans = np.diff(depths).astype(np.float32)
    deltas[:-1] = np.clip(spans[:, None, None] * inv[None], 0.0, None)
    deltas[-1] = deltas[-2]
    return deltas


def warp_layer(
    layer: MpiLayer, source: CameraModel, target: CameraModel
) -> tuple[np.ndarray, np.ndarray]:
    """Resample one layer plane into the target view.

    Uses the homography induced by the layer plane between the two cameras;
    samples outside the source image, and pixels from which the plane is not
    visible, come back fully transparent (density 0).

    Returns:
        (color, density) at the target resolution.
    """
    rd, t, _ = _target_rays_in_source(source, target)
    xs, ys, valid = _plane_sample_coords(layer.depth, rd, t, source)
    packed = np.concatenate([layer.color, layer.density[..., None]], axis=-1)
    sampled = bilinear_sample(packed, xs, ys)
    sampled[~valid] = 0.0
    color = np.ascontiguousarray(sampled[..., :3])
    density = np.clip(sampled[..., 3], 0.0, None)
    return color, density


def warp_volume(mpi: MpiVolume, target: CameraModel) -> WarpedStack:
    """Warp every layer of a volume into the target view, with ray spacings."""
    h, w = target.height, target.width
    d = mpi.layer_count
    rd, t, _ = _target_rays_in_source(mpi.reference, target)
    colors = np.empty((d, h, w, 3), dtype=np.float32)
    densities = np.empty((d, h, w), dtype=np.float32)
    for i, layer in enumerate(mpi.layers):
        xs, ys, valid = _plane_sample_coords(layer.depth, rd, t, mpi.reference)
        packed = np.concatenate([layer.color, layer.density[..., None]], axis=-1)
        sampled = bilinear_sample(packed, xs, ys)
        sampled[~valid] = 0.0
        colors[i] = sampled[..., :3]
        densities[i] = np.clip(sampled[..., 3], 0.0, None)
    deltas = ray_deltas(mpi.layer_depths, mpi.reference, target)
    return WarpedStack(colors=colors, densities=densities, deltas=deltas)


def composite(mpi: MpiVolume, stack: WarpedStack) -> RenderedView:
    """Accumulate a warped layer stack front to back into a single view.

    Layer opacity is ``1 - exp(-delta * density)``; colors, alpha, and
    per-layer inverse depths all composite with the same over-operator
    weights. Output alpha is clamped to [0, 1].
    """
    if stack.layer_count != mpi.layer_count:
        raise ValueError(
            f"stack has {stack.layer_count} layers but volume has {mpi.layer_count}"
        )
    alpha = -np.expm1(-stack.deltas * stack.densities)
    transmittance = np.cumprod(1.0 - alpha, axis=0)
    weights = alpha.copy()
    weights[1:] *= transmittance[:-1]

    color = np.einsum("dhw,dhwc->hwc", weights, stack.colors.astype(weights.dtype))
    total_alpha = np.clip(weights.sum(axis=0), 0.0, 1.0)
    inv_depths = (1.0 / mpi.layer_depths).astype(weights.dtype)
    disparity = np.tensordot(inv_depths, weights, axes=(0, 0))
    return RenderedView(
        color=color.astype(np.float32),
        alpha=total_alpha.astype(np.float32),
        disparity=disparity.astype(np.float32),
    )


def render(mpi: MpiVolume, target: CameraModel) -> RenderedView:
    """Render a volume at a novel view: warp each layer, then composite."""
    return composite(mpi, warp_volume(mpi, target))
