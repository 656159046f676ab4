"""Pinhole camera model: square-pixel intrinsics plus a rigid pose in the world frame."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvariantViolation

_ROTATION_TOL = 1e-9


@dataclass(frozen=True)
class CameraModel:
    """Pinhole intrinsics and world pose.

    The pose maps camera coordinates into world coordinates:
    ``X_world = rotation @ X_cam + translation``, i.e. ``rotation`` is the
    world-from-camera rotation and ``translation`` is the camera center in
    world coordinates (meters). The camera looks down its local +z axis;
    pixel centers sit at integer coordinates with ``(0, 0)`` the top-left
    pixel.

    Attributes:
        f: Focal length in pixels (square pixels, shared by both axes).
        cx: Principal point x in pixels.
        cy: Principal point y in pixels.
        width: Image width in pixels.
        height: Image height in pixels.
        rotation: 3x3 orthonormal world-from-camera rotation, det +1.
        translation: Camera center in world coordinates, shape (3,).
    """

    f: float
    cx: float
    cy: float
    width: int
    height: int
    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self) -> None:
        object.__setattr__(self, "rotation", np.asarray(self.rotation, dtype=np.float64))
        object.__setattr__(self, "translation", np.asarray(self.translation, dtype=np.float64))
        if self.f <= 0:
            raise InvariantViolation(f"focal length must be positive, got {self.f}")
        if self.width <= 0 or self.height <= 0:
            raise InvariantViolation(
                f"resolution must be positive, got {self.width}x{self.height}"
            )
        if self.rotation.shape != (3, 3):
            raise InvariantViolation(f"rotation must be 3x3, got {self.rotation.shape}")
        if self.translation.shape != (3,):
            raise InvariantViolation(
                f"translation must be a 3-vector, got {self.translation.shape}"
            )
        err = np.abs(self.rotation.T @ self.rotation - np.eye(3)).max()
        if err > _ROTATION_TOL:
            raise InvariantViolation(f"rotation is not orthonormal (max error {err:.3e})")
        det = float(np.linalg.det(self.rotation))
        if abs(det - 1.0) > _ROTATION_TOL:
            raise InvariantViolation(f"rotation determinant must be +1, got {det}")
        self.rotation.setflags(write=False)
        self.translation.setflags(write=False)

    @classmethod
    def from_fov(
        cls,
        fov_x: float,
        width: int,
        height: int,
        rotation: np.ndarray | None = None,
        translation: np.ndarray | None = None,
    ) -> CameraModel:
        """Build a camera from a horizontal field of view in radians.

        The principal point is centered on the pixel grid.
        """
        f = width / (2.0 * math.tan(fov_x / 2.0))
        return cls(
            f=f,
            cx=(width - 1) / 2.0,
            cy=(height - 1) / 2.0,
            width=width,
            height=height,
            rotation=np.eye(3) if rotation is None else rotation,
            translation=np.zeros(3) if translation is None else translation,
        )

    @property
    def fov_x(self) -> float:
        """Horizontal field of view in radians."""
        return 2.0 * math.atan(self.width / (2.0 * self.f))

    @property
    def intrinsics(self) -> np.ndarray:
        """3x3 intrinsic matrix."""
        return np.array(
            [[self.f, 0.0, self.cx], [0.0, self.f, self.cy], [0.0, 0.0, 1.0]]
        )

    def moved_to(self, translation: np.ndarray, rotation: np.ndarray | None = None) -> CameraModel:
        """Copy of this camera at a new pose (same intrinsics)."""
        return replace(
            self,
            translation=np.asarray(translation, dtype=np.float64),
            rotation=self.rotation if rotation is None else np.asarray(rotation, dtype=np.float64),
        )

    def world_to_camera(self, points: np.ndarray) -> np.ndarray:
        """Transform world points (..., 3) into camera coordinates."""
        pts = np.asarray(points, dtype=np.float64)
        return (pts - self.translation) @ self.rotation

    def camera_to_world(self, points: np.ndarray) -> np.ndarray:
        """Transform camera points (..., 3) into world coordinates."""
        pts = np.asarray(points, dtype=np.float64)
        return pts @ self.rotation.T + self.translation

    def project(self, points_world: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Project world points to pixel coordinates.

        Args:
            points_world: Points in world coordinates, shape (..., 3).

        Returns:
            pixels: (u, v) pixel coordinates, shape (..., 2). Points at or
                behind the camera plane produce non-finite values.
            depth: Camera-frame z for each point, shape (...,).
        """
        pts = self.world_to_camera(points_world)
        z = pts[..., 2]
        with np.errstate(divide="ignore", invalid="ignore"):
            u = np.where(z > 0, self.f * pts[..., 0] / z + self.cx, np.nan)
            v = np.where(z > 0, self.f * pts[..., 1] / z + self.cy, np.nan)
        return np.stack([u, v], axis=-1), z

    def pixel_directions(self) -> np.ndarray:
        """Unnormalized camera-frame ray directions for every pixel.

        Returns shape (height, width, 3) with z component 1, so a point at
        camera depth z along pixel (x, y) is ``z * pixel_directions()[y, x]``.
        """
        xs = np.arange(self.width, dtype=np.float64)
        ys = np.arange(self.height, dtype=np.float64)
        gx, gy = np.meshgrid(xs, ys)
        d = np.empty((self.height, self.width, 3))
        d[..., 0] = (gx - self.cx) / self.f
        d[..., 1] = (gy - self.cy) / self.f
        d[..., 2] = 1.0
        return d

    def same_intrinsics(self, other: CameraModel) -> bool:
        return (
            self.f == other.f
            and self.cx == other.cx
            and self.cy == other.cy
            and self.width == other.width
            and self.height == other.height
        )
