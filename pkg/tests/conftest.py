"""Shared fixtures: small cameras, scenes, and random generators."""

import numpy as np
import pytest

from lfcapture import (
    CameraModel,
    PlaidTexture,
    RectanglePrimitive,
    SceneSpec,
    line_trajectory,
)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def small_camera() -> CameraModel:
    """Landscape test camera, cheap enough for per-test renders."""
    return CameraModel.from_fov(0.9, 64, 48)


@pytest.fixture
def plane_scene() -> SceneSpec:
    """A single smooth-textured wall at 2 m filling every test view."""
    wall = RectanglePrimitive(
        size=(8.0, 6.0),
        texture=PlaidTexture(cycles_u=3.0, cycles_v=2.0),
        translation=np.array([0.0, 0.0, 2.0]),
    )
    return SceneSpec(primitives=(wall,), depth_range=(1.8, 2.2), name="test-plane")


@pytest.fixture
def short_trajectory(small_camera):
    """Nine poses sweeping 5 cm horizontally."""
    return line_trajectory(
        small_camera, np.array([-0.025, 0.0, 0.0]), np.array([0.025, 0.0, 0.0]), 9
    )


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniformly random proper rotation matrix."""
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )
