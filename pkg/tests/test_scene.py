"""Tests for the synthetic-scene raycaster and its ground-truth guarantees."""

import numpy as np
import pytest

from lfcapture import (
    BoxPrimitive,
    CameraModel,
    CheckerTexture,
    DEPTH_SENTINEL,
    GradientTexture,
    InvariantViolation,
    PlaidTexture,
    RectanglePrimitive,
    SceneSpec,
    SolidTexture,
    Trajectory,
    line_trajectory,
    render_scene,
)

from conftest import random_rotation


class TestRenderScene:
    def test_fronto_parallel_plane_constant_depth(self, small_camera):
        wall = RectanglePrimitive(
            size=(10.0, 10.0), texture=SolidTexture((0.5, 0.5, 0.5)),
            translation=np.array([0.0, 0.0, 2.0]),
        )
        frame = render_scene(SceneSpec(primitives=(wall,), depth_range=(1.5, 2.5)), small_camera)
        np.testing.assert_allclose(frame.depth, 2.0, atol=1e-6)

    def test_misses_take_background_and_sentinel(self, small_camera):
        tiny = RectanglePrimitive(
            size=(0.12, 0.12), texture=SolidTexture((1.0, 1.0, 1.0)),
            translation=np.array([0.0, 0.0, 2.0]),
        )
        scene = SceneSpec(primitives=(tiny,), background=(0.1, 0.2, 0.3), depth_range=(1.5, 2.5))
        frame = render_scene(scene, small_camera)
        missed = frame.depth == DEPTH_SENTINEL
        assert 0.9 < missed.mean() < 1.0
        expected = np.broadcast_to((0.1, 0.2, 0.3), frame.rgb[missed].shape)
        np.testing.assert_allclose(frame.rgb[missed], expected, atol=1e-6)

    def test_nearest_primitive_wins(self, small_camera):
        far = RectanglePrimitive(size=(10, 10), texture=SolidTexture((0, 0, 1)),
                                 translation=np.array([0, 0, 3.0]))
        near = RectanglePrimitive(size=(0.5, 0.5), texture=SolidTexture((1, 0, 0)),
                                  translation=np.array([0, 0, 1.0]))
        frame = render_scene(SceneSpec(primitives=(far, near), depth_range=(0.5, 3.5)), small_camera)
        cy, cx = small_camera.height // 2, small_camera.width // 2
        np.testing.assert_allclose(frame.rgb[cy, cx], (1, 0, 0), atol=1e-6)
        assert frame.depth[cy, cx] == pytest.approx(1.0, abs=1e-6)
        np.testing.assert_allclose(frame.rgb[0, 0], (0, 0, 1), atol=1e-6)

    def test_deterministic(self, small_camera, plane_scene):
        a = render_scene(plane_scene, small_camera)
        b = render_scene(plane_scene, small_camera)
        np.testing.assert_array_equal(a.rgb, b.rgb)
        np.testing.assert_array_equal(a.depth, b.depth)

    def test_depth_matches_scalar_ray_oracle(self, rng):
        """Vectorized depths equal an independent per-ray intersection."""
        camera = CameraModel(
            f=70.0, cx=23.5, cy=15.5, width=48, height=32,
            rotation=random_rotation(rng), translation=rng.normal(scale=0.2, size=3),
        )
        prims = (
            RectanglePrimitive(
                size=(3.0, 2.0), texture=SolidTexture((1, 1, 1)),
                rotation=random_rotation(rng), translation=np.array([0.2, 0.1, 2.0]),
            ),
            BoxPrimitive(
                size=(0.8, 0.6, 0.5), texture=SolidTexture((0, 1, 0)),
                rotation=random_rotation(rng), translation=np.array([-0.3, 0.0, 1.2]),
            ),
        )
        scene = SceneSpec(primitives=prims, depth_range=(0.5, 3.5))
        frame = render_scene(scene, camera)
        for _ in range(60):
            x = int(rng.integers(0, 48))
            y = int(rng.integers(0, 32))
            t = _scalar_nearest_hit(prims, camera, x, y)
            expect = t if t is not None else DEPTH_SENTINEL
            assert frame.depth[y, x] == pytest.approx(expect, abs=1e-6)

    def test_checkerboard_corners_match_projection(self):
        """Detected chessboard corners land on the analytic pinhole projections."""
        cv2 = pytest.importorskip("cv2")
        camera = CameraModel.from_fov(1.0, 320, 240)
        squares_x, squares_y = 7, 6
        board_size = (0.7, 0.6)
        # Tilted in-plane so checker edges are not pixel-axis aligned;
        # otherwise edge quantization biases detection by up to half a pixel.
        tilt = 0.15
        rot = np.array([
            [np.cos(tilt), -np.sin(tilt), 0.0],
            [np.sin(tilt), np.cos(tilt), 0.0],
            [0.0, 0.0, 1.0],
        ])
        board = RectanglePrimitive(
            size=board_size,
            texture=CheckerTexture(squares_x=squares_x, squares_y=squares_y,
                                   color_a=(1, 1, 1), color_b=(0, 0, 0)),
            rotation=rot,
            translation=np.array([0.0, 0.0, 1.5]),
        )
        backing = RectanglePrimitive(  # quiet zone around the board
            size=(3.0, 3.0), texture=SolidTexture((1.0, 1.0, 1.0)),
            translation=np.array([0.0, 0.0, 1.501]),
        )
        scene = SceneSpec(primitives=(board, backing), depth_range=(1.0, 2.0))
        frame = render_scene(scene, camera)
        gray = (frame.rgb.mean(axis=2) * 255).astype(np.uint8)
        # Mild blur softens the aliased (one-sample) checker edges for subpixel fitting.
        gray = cv2.GaussianBlur(gray, (3, 3), 0.8)

        pattern = (squares_x - 1, squares_y - 1)
        found, corners = cv2.findChessboardCorners(gray, pattern)
        assert found
        corners = cv2.cornerSubPix(
            gray, corners, (7, 7), (-1, -1),
            (cv2.TERM_CRITERIA_EPS + cv2.TERM_CRITERIA_MAX_ITER, 100, 1e-5),
        ).reshape(-1, 2)

        expected = []
        for j in range(1, squares_y):
            for i in range(1, squares_x):
                local = np.array([
                    (i / squares_x - 0.5) * board_size[0],
                    (j / squares_y - 0.5) * board_size[1],
                    0.0,
                ])
                world = board.rotation @ local + board.translation
                pix, _ = camera.project(world)
                expected.append(pix)
        expected = np.array(expected)

        # Detector ordering varies; match each analytic corner to its nearest.
        for e in expected:
            assert np.min(np.linalg.norm(corners - e, axis=1)) <= 0.5


def _scalar_nearest_hit(prims, camera, x, y):
    """Independent nearest-intersection depth for one pixel, world-frame math."""
    d_cam = np.array([(x - camera.cx) / camera.f, (y - camera.cy) / camera.f, 1.0])
    d_world = camera.rotation @ d_cam
    origin = camera.translation
    best = None
    for prim in prims:
        o = prim.rotation.T @ (origin - prim.translation)
        d = prim.rotation.T @ d_world
        if isinstance(prim, RectanglePrimitive):
            if abs(d[2]) < 1e-12:
                continue
            t = -o[2] / d[2]
            p = o + t * d
            if t > 1e-9 and abs(p[0]) <= prim.size[0] / 2 and abs(p[1]) <= prim.size[1] / 2:
                if best is None or t < best:
                    best = t
        else:
            half = np.asarray(prim.size) / 2
            t_lo, t_hi = -np.inf, np.inf
            ok = True
            for axis in range(3):
                if abs(d[axis]) < 1e-12:
                    if abs(o[axis]) > half[axis]:
                        ok = False
                        break
                    continue
                t1 = (-half[axis] - o[axis]) / d[axis]
                t2 = (half[axis] - o[axis]) / d[axis]
                t_lo = max(t_lo, min(t1, t2))
                t_hi = min(t_hi, max(t1, t2))
            if not ok or t_lo > t_hi:
                continue
            t = t_lo if t_lo > 1e-9 else t_hi
            if t > 1e-9 and (best is None or t < best):
                best = t
    return best


class TestTextures:
    def test_gradient_is_linear_in_u(self):
        tex = GradientTexture(color_a=(0, 0, 0), color_b=(1, 1, 1))
        u = np.array([0.0, 0.25, 1.0])
        out = tex.sample(u, np.zeros(3))
        np.testing.assert_allclose(out[:, 0], u, atol=1e-12)

    def test_checker_parity(self):
        tex = CheckerTexture(squares_x=2, squares_y=2, color_a=(1, 1, 1), color_b=(0, 0, 0))
        out = tex.sample(np.array([0.25, 0.75, 0.25]), np.array([0.25, 0.25, 0.75]))
        np.testing.assert_allclose(out[0], (1, 1, 1))
        np.testing.assert_allclose(out[1], (0, 0, 0))
        np.testing.assert_allclose(out[2], (0, 0, 0))

    def test_plaid_stays_in_range(self):
        tex = PlaidTexture()
        u, v = np.meshgrid(np.linspace(0, 1, 40), np.linspace(0, 1, 40))
        out = tex.sample(u, v)
        assert out.min() >= 0.0 and out.max() <= 1.0


class TestSceneSpecInvariants:
    def test_needs_primitives(self):
        with pytest.raises(InvariantViolation):
            SceneSpec(primitives=())

    def test_rejects_bad_sizes(self):
        with pytest.raises(InvariantViolation):
            RectanglePrimitive(size=(0.0, 1.0), texture=SolidTexture((1, 1, 1)))
        with pytest.raises(InvariantViolation):
            BoxPrimitive(size=(1.0, -1.0, 1.0), texture=SolidTexture((1, 1, 1)))

    def test_rejects_bad_depth_range(self):
        wall = RectanglePrimitive(size=(1, 1), texture=SolidTexture((1, 1, 1)))
        with pytest.raises(InvariantViolation):
            SceneSpec(primitives=(wall,), depth_range=(2.0, 1.0))


class TestTrajectory:
    def test_needs_poses(self):
        with pytest.raises(InvariantViolation):
            Trajectory(poses=())

    def test_rejects_mixed_intrinsics(self, small_camera):
        other = CameraModel.from_fov(0.5, 32, 32)
        with pytest.raises(InvariantViolation, match="intrinsics"):
            Trajectory(poses=(small_camera, other))

    def test_line_trajectory_spacing(self, small_camera):
        traj = line_trajectory(small_camera, [0, 0, 0], [0.08, 0, 0], 5)
        assert len(traj) == 5
        assert traj.spacing == pytest.approx(0.02)
        np.testing.assert_allclose(traj.arc_lengths, [0, 0.02, 0.04, 0.06, 0.08], atol=1e-12)
