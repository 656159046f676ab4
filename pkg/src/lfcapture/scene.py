"""Synthetic ground-truth scenes: textured planar/box primitives ray-cast to RGBD.

Textures are procedural and band-limited (no sub-pixel detail) except the hard
checkerboard, so that resampling-based reconstructions can hit high PSNR.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .camera import CameraModel
from .errors import InvariantViolation
from .frame import DEPTH_SENTINEL, RgbdFrame

_RAY_EPS = 1e-9


# --------------------------------------------------------------------------
# Textures: map (u, v) in [0, 1]^2 to RGB.


@dataclass(frozen=True)
class SolidTexture:
    color: tuple[float, float, float]

    def sample(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        out = np.empty((*np.shape(u), 3))
        out[:] = self.color
        return out


@dataclass(frozen=True)
class CheckerTexture:
    """Hard-edged checkerboard; not band-limited, use for corner geometry checks."""

    squares_x: int = 8
    squares_y: int = 8
    color_a: tuple[float, float, float] = (0.95, 0.95, 0.95)
    color_b: tuple[float, float, float] = (0.05, 0.05, 0.05)

    def sample(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        iu = np.clip((np.asarray(u) * self.squares_x).astype(int), 0, self.squares_x - 1)
        iv = np.clip((np.asarray(v) * self.squares_y).astype(int), 0, self.squares_y - 1)
        parity = (iu + iv) % 2
        a = np.asarray(self.color_a)
        b = np.asarray(self.color_b)
        return np.where(parity[..., None] == 0, a, b)


@dataclass(frozen=True)
class GradientTexture:
    """Bilinear blend between two colors along u plus an optional v tilt."""

    color_a: tuple[float, float, float] = (0.1, 0.2, 0.8)
    color_b: tuple[float, float, float] = (0.9, 0.7, 0.1)
    v_weight: float = 0.0

    def sample(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        t = np.clip(np.asarray(u) + self.v_weight * np.asarray(v), 0.0, 1.0)
        a = np.asarray(self.color_a)
        b = np.asarray(self.color_b)
        return a + t[..., None] * (b - a)


@dataclass(frozen=True)
class PlaidTexture:
    """Smooth sinusoidal plaid; band-limited for resampling-friendly detail."""

    color_a: tuple[float, float, float] = (0.15, 0.25, 0.55)
    color_b: tuple[float, float, float] = (0.85, 0.75, 0.35)
    cycles_u: float = 3.0
    cycles_v: float = 3.0
    phase: float = 0.0

    def sample(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        wave = 0.5 + 0.25 * np.sin(2 * np.pi * (self.cycles_u * np.asarray(u) + self.phase))
        wave = wave + 0.25 * np.sin(2 * np.pi * self.cycles_v * np.asarray(v))
        a = np.asarray(self.color_a)
        b = np.asarray(self.color_b)
        return a + wave[..., None] * (b - a)


@dataclass(frozen=True)
class ImageTexture:
    """Bilinearly sampled raster image, v running top to bottom.

    ``source`` records the originating file path, if any, so scene files can
    reference it.
    """

    image: np.ndarray
    source: str | None = None

    def sample(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        from .rendering import bilinear_sample

        h, w = self.image.shape[:2]
        xs = np.clip(np.asarray(u), 0.0, 1.0) * (w - 1)
        ys = np.clip(np.asarray(v), 0.0, 1.0) * (h - 1)
        return bilinear_sample(np.asarray(self.image, dtype=np.float64), xs, ys)


Texture = SolidTexture | CheckerTexture | GradientTexture | PlaidTexture | ImageTexture


# --------------------------------------------------------------------------
# Primitives: textured rectangles and boxes with a rigid world pose.


@dataclass(frozen=True)
class RectanglePrimitive:
    """Rectangle in its local z=0 plane, sized in meters, posed in the world.

    Texture coordinates run u along local +x and v along local +y, origin at
    the rectangle's (-x, -y) corner.
    """

    size: tuple[float, float]
    texture: Texture
    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self) -> None:
        object.__setattr__(self, "rotation", np.asarray(self.rotation, dtype=np.float64))
        object.__setattr__(self, "translation", np.asarray(self.translation, dtype=np.float64))
        if self.size[0] <= 0 or self.size[1] <= 0:
            raise InvariantViolation(f"rectangle size must be positive, got {self.size}")

    def intersect(
        self, origins: np.ndarray, directions: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Ray-rectangle hits. Returns (t, u, v); t is inf where there is no hit."""
        o = (origins - self.translation) @ self.rotation
        d = directions @ self.rotation
        dz = d[..., 2]
        safe_dz = np.where(np.abs(dz) < _RAY_EPS, _RAY_EPS, dz)
        t = -o[..., 2] / safe_dz
        px = o[..., 0] + t * d[..., 0]
        py = o[..., 1] + t * d[..., 1]
        sx, sy = self.size
        hit = (
            (np.abs(dz) >= _RAY_EPS)
            & (t > _RAY_EPS)
            & (np.abs(px) <= sx / 2)
            & (np.abs(py) <= sy / 2)
        )
        u = px / sx + 0.5
        v = py / sy + 0.5
        return np.where(hit, t, np.inf), u, v


@dataclass(frozen=True)
class BoxPrimitive:
    """Axis-aligned box in its local frame, sized in meters, posed in the world."""

    size: tuple[float, float, float]
    texture: Texture
    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self) -> None:
        object.__setattr__(self, "rotation", np.asarray(self.rotation, dtype=np.float64))
        object.__setattr__(self, "translation", np.asarray(self.translation, dtype=np.float64))
        if min(self.size) <= 0:
            raise InvariantViolation(f"box size must be positive, got {self.size}")

    def intersect(
        self, origins: np.ndarray, directions: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Slab-method ray-box hits. Returns (t, u, v); t is inf where no hit."""
        o = (origins - self.translation) @ self.rotation
        d = directions @ self.rotation
        half = np.asarray(self.size) / 2.0
        safe_d = np.where(np.abs(d) < _RAY_EPS, _RAY_EPS, d)
        t1 = (-half - o) / safe_d
        t2 = (half - o) / safe_d
        t_near = np.maximum.reduce(np.minimum(t1, t2), axis=-1)
        t_far = np.minimum.reduce(np.maximum(t1, t2), axis=-1)
        t = np.where(t_near > _RAY_EPS, t_near, t_far)
        hit = (t_near <= t_far) & (t > _RAY_EPS)
        t = np.where(hit, t, np.inf)

        p = o + np.where(np.isfinite(t), t, 0.0)[..., None] * d
        # Face = axis where the hit point sits on the slab boundary.
        boundary = np.abs(np.abs(p) - half)
        face = np.argmin(boundary, axis=-1)
        u = np.empty(t.shape)
        v = np.empty(t.shape)
        for axis, (ua, va) in enumerate(((1, 2), (0, 2), (0, 1))):
            sel = face == axis
            u[sel] = p[sel, ua] / (2 * half[ua]) + 0.5
            v[sel] = p[sel, va] / (2 * half[va]) + 0.5
        return t, np.clip(u, 0.0, 1.0), np.clip(v, 0.0, 1.0)


Primitive = RectanglePrimitive | BoxPrimitive


@dataclass(frozen=True)
class SceneSpec:
    """A renderable scene: primitives, a background color, and a depth-range hint.

    The hint brackets the scene content along the viewing axis and seeds the
    near/far planes used when layering captured views.
    """

    primitives: tuple[Primitive, ...]
    background: tuple[float, float, float] = (0.0, 0.0, 0.0)
    depth_range: tuple[float, float] = (0.5, 3.0)
    name: str = "scene"

    def __post_init__(self) -> None:
        object.__setattr__(self, "primitives", tuple(self.primitives))
        if len(self.primitives) == 0:
            raise InvariantViolation("a scene needs at least one primitive")
        if not 0 < self.depth_range[0] < self.depth_range[1]:
            raise InvariantViolation(f"bad depth range {self.depth_range}")


def render_scene(scene: SceneSpec, camera: CameraModel) -> RgbdFrame:
    """Ray-cast a scene to an RGBD frame at a camera.

    Every pixel gets the nearest primitive hit; depth is the camera-frame z
    of the hit point. Misses take the background color and the depth
    sentinel. Deterministic: one primary ray per pixel, no sampling noise.
    """
    dirs_cam = camera.pixel_directions()
    dirs_world = dirs_cam @ camera.rotation.T
    origins = np.broadcast_to(camera.translation, dirs_world.shape)

    h, w = camera.height, camera.width
    best_t = np.full((h, w), np.inf)
    color = np.empty((h, w, 3))
    color[:] = scene.background
    for prim in scene.primitives:
        t, u, v = prim.intersect(origins, dirs_world)
        closer = t < best_t
        if np.any(closer):
            tex = prim.texture.sample(u[closer], v[closer])
            color[closer] = tex
            best_t[closer] = t[closer]

    # Ray parameter equals camera-frame z because directions have unit z there.
    depth = np.where(np.isfinite(best_t), best_t, DEPTH_SENTINEL)
    return RgbdFrame(
        rgb=np.clip(color, 0.0, 1.0).astype(np.float32),
        depth=depth.astype(np.float32),
        camera=camera,
    )


@dataclass(frozen=True)
class Trajectory:
    """An ordered camera path with shared intrinsics."""

    poses: tuple[CameraModel, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "poses", tuple(self.poses))
        if len(self.poses) == 0:
            raise InvariantViolation("a trajectory needs at least one pose")
        first = self.poses[0]
        for i, p in enumerate(self.poses[1:], start=1):
            if not first.same_intrinsics(p):
                raise InvariantViolation(f"pose {i} has different intrinsics from pose 0")

    def __len__(self) -> int:
        return len(self.poses)

    @property
    def spacing(self) -> float:
        """Mean distance between consecutive camera centers, meters."""
        if len(self.poses) < 2:
            return 0.0
        centers = np.stack([p.translation for p in self.poses])
        return float(np.linalg.norm(np.diff(centers, axis=0), axis=1).mean())

    @property
    def arc_lengths(self) -> np.ndarray:
        """Cumulative center-to-center path length at each pose, meters."""
        centers = np.stack([p.translation for p in self.poses])
        gaps = np.linalg.norm(np.diff(centers, axis=0), axis=1)
        return np.concatenate([[0.0], np.cumsum(gaps)])


def line_trajectory(
    camera: CameraModel, start: np.ndarray, stop: np.ndarray, count: int
) -> Trajectory:
    """Evenly spaced poses along a world-space segment with a fixed orientation."""
    if count < 1:
        raise InvariantViolation(f"trajectory needs at least one pose, got {count}")
    start = np.asarray(start, dtype=np.float64)
    stop = np.asarray(stop, dtype=np.float64)
    ts = np.linspace(0.0, 1.0, count)
    poses = tuple(camera.moved_to(start + t * (stop - start)) for t in ts)
    return Trajectory(poses=poses)
