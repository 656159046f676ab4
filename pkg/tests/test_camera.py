"""Tests for the pinhole camera model."""

import math

import numpy as np
import pytest

from lfcapture import CameraModel, InvariantViolation

from conftest import random_rotation


class TestInvariants:
    def test_rejects_non_orthonormal_rotation(self):
        bad = np.eye(3)
        bad[0, 1] = 1e-3
        with pytest.raises(InvariantViolation, match="orthonormal"):
            CameraModel(f=100, cx=32, cy=24, width=64, height=48, rotation=bad)

    def test_rejects_reflection(self):
        mirror = np.diag([1.0, 1.0, -1.0])
        with pytest.raises(InvariantViolation, match="determinant"):
            CameraModel(f=100, cx=32, cy=24, width=64, height=48, rotation=mirror)

    def test_rejects_bad_focal_and_resolution(self):
        with pytest.raises(InvariantViolation):
            CameraModel(f=0, cx=32, cy=24, width=64, height=48)
        with pytest.raises(InvariantViolation):
            CameraModel(f=100, cx=32, cy=24, width=0, height=48)

    def test_accepts_rotation_within_tolerance(self, rng):
        rot = random_rotation(rng)
        cam = CameraModel(f=100, cx=32, cy=24, width=64, height=48, rotation=rot)
        assert cam.rotation.shape == (3, 3)


class TestGeometry:
    def test_fov_matches_focal_length(self):
        cam = CameraModel.from_fov(math.radians(45.93), 294, 639)
        assert cam.fov_x == pytest.approx(math.radians(45.93), rel=1e-12)
        assert cam.f == pytest.approx(294 / (2 * math.tan(math.radians(45.93) / 2)))

    def test_project_unproject_round_trip(self, rng):
        cam = CameraModel(
            f=120.0,
            cx=31.5,
            cy=23.5,
            width=64,
            height=48,
            rotation=random_rotation(rng),
            translation=rng.normal(size=3),
        )
        dirs = cam.pixel_directions()
        depth = 2.5
        pts_world = cam.camera_to_world(dirs * depth)
        pixels, z = cam.project(pts_world)
        gx, gy = np.meshgrid(np.arange(64), np.arange(48))
        np.testing.assert_allclose(pixels[..., 0], gx, atol=1e-9)
        np.testing.assert_allclose(pixels[..., 1], gy, atol=1e-9)
        np.testing.assert_allclose(z, depth, atol=1e-12)

    def test_project_behind_camera_is_nan(self):
        cam = CameraModel(f=100, cx=32, cy=24, width=64, height=48)
        pixels, z = cam.project(np.array([0.0, 0.0, -1.0]))
        assert np.all(np.isnan(pixels))
        assert z == -1.0

    def test_world_camera_round_trip(self, rng):
        cam = CameraModel(
            f=100,
            cx=32,
            cy=24,
            width=64,
            height=48,
            rotation=random_rotation(rng),
            translation=rng.normal(size=3),
        )
        pts = rng.normal(size=(10, 3))
        np.testing.assert_allclose(
            cam.camera_to_world(cam.world_to_camera(pts)), pts, atol=1e-12
        )

    def test_moved_to_keeps_intrinsics(self):
        cam = CameraModel.from_fov(0.8, 64, 48)
        moved = cam.moved_to([1.0, 2.0, 3.0])
        assert moved.same_intrinsics(cam)
        np.testing.assert_array_equal(moved.translation, [1.0, 2.0, 3.0])
