"""Tests for volume construction by disparity binning."""

import numpy as np
import pytest

from lfcapture import (
    CameraModel,
    DEPTH_SENTINEL,
    RgbdFrame,
    layer_depths_uniform_disparity,
    mpi_from_rgbd,
    psnr,
    render,
    render_scene,
)


def flat_frame(depth_value, camera, color=(0.3, 0.6, 0.9)):
    rgb = np.zeros((camera.height, camera.width, 3), dtype=np.float32)
    rgb[:] = color
    depth = np.full((camera.height, camera.width), depth_value, dtype=np.float32)
    return RgbdFrame(rgb=rgb, depth=depth, camera=camera)


@pytest.fixture
def tiny_camera():
    return CameraModel(f=40.0, cx=7.5, cy=5.5, width=16, height=12)


class TestLayerPlacement:
    def test_uniform_in_disparity(self):
        depths = layer_depths_uniform_disparity(5, 1.0, 2.0)
        np.testing.assert_allclose(1.0 / depths, np.linspace(1.0, 0.5, 5), atol=1e-12)
        assert np.all(np.diff(depths) > 0)

    def test_depth_on_plane_takes_single_layer(self, tiny_camera):
        # Bins at disparities {1, 0.75, 0.5}; depth 2.0 sits exactly on the last.
        frame = flat_frame(2.0, tiny_camera)
        mpi = mpi_from_rgbd(frame, 3, 1.0, 2.0)
        alphas = [
            1.0 - np.exp(-layer.density * _reference_deltas(mpi, i))
            for i, layer in enumerate(mpi.layers)
        ]
        np.testing.assert_allclose(alphas[0], 0.0, atol=1e-9)
        np.testing.assert_allclose(alphas[1], 0.0, atol=1e-9)
        np.testing.assert_allclose(alphas[2], 1.0, atol=1e-5)

    def test_midpoint_split_is_half_half(self, tiny_camera):
        # Disparity midway between planes 0 (disp 1.0) and 1 (disp 0.75).
        frame = flat_frame(1.0 / 0.875, tiny_camera)
        mpi = mpi_from_rgbd(frame, 3, 1.0, 2.0)
        view = render(mpi, tiny_camera)
        # Realized compositing weights: 0.5 on each bracketing plane.
        alpha0 = 1.0 - np.exp(-mpi.layers[0].density * _reference_deltas(mpi, 0))
        np.testing.assert_allclose(alpha0, 0.5, atol=1e-5)
        np.testing.assert_allclose(view.alpha, 1.0, atol=1e-5)
        np.testing.assert_allclose(view.disparity, 0.875, atol=1e-5)


def _reference_deltas(mpi, layer_index):
    from lfcapture import ray_deltas

    return ray_deltas(mpi.layer_depths, mpi.reference, mpi.reference)[layer_index]


class TestRoundTrip:
    def test_self_reprojection_quality(self, small_camera, plane_scene):
        frame = render_scene(plane_scene, small_camera)
        mpi = mpi_from_rgbd(frame, 8, 1.8, 2.2)
        view = render(mpi, small_camera)
        assert psnr(view.color, frame.rgb) >= 50.0
        half_bin = 0.5 * (1 / 1.8 - 1 / 2.2) / 7
        assert np.abs(view.disparity - 1.0 / frame.depth).max() <= half_bin

    def test_split_weights_reproduce_alpha_and_disparity(self, rng, tiny_camera):
        depth = rng.uniform(1.05, 1.95, (12, 16)).astype(np.float32)
        rgb = rng.uniform(0, 1, (12, 16, 3)).astype(np.float32)
        frame = RgbdFrame(rgb=rgb, depth=depth, camera=tiny_camera)
        mpi = mpi_from_rgbd(frame, 6, 1.0, 2.0)
        view = render(mpi, tiny_camera)
        np.testing.assert_allclose(view.alpha, 1.0, atol=1e-5)
        np.testing.assert_allclose(view.disparity, 1.0 / depth, atol=1e-5)

    def test_sentinel_pixels_contribute_nothing(self, tiny_camera):
        frame = flat_frame(1.5, tiny_camera)
        depth = frame.depth.copy()
        depth[:4, :] = DEPTH_SENTINEL
        frame = RgbdFrame(rgb=frame.rgb, depth=depth, camera=tiny_camera)
        view = render(mpi_from_rgbd(frame, 4, 1.0, 2.0), tiny_camera)
        np.testing.assert_allclose(view.alpha[:4, :], 0.0, atol=1e-9)
        np.testing.assert_allclose(view.alpha[4:, :], 1.0, atol=1e-5)

    def test_out_of_range_depth_clamps(self, tiny_camera, caplog):
        frame = flat_frame(5.0, tiny_camera)  # beyond z_far = 2
        import logging

        with caplog.at_level(logging.INFO, logger="lfcapture.binning"):
            mpi = mpi_from_rgbd(frame, 4, 1.0, 2.0)
        view = render(mpi, tiny_camera)
        np.testing.assert_allclose(view.disparity, 0.5, atol=1e-5)
        assert any("clamped" in rec.message for rec in caplog.records)


class TestArguments:
    def test_needs_two_layers(self, tiny_camera):
        with pytest.raises(ValueError, match="2 layers"):
            mpi_from_rgbd(flat_frame(1.5, tiny_camera), 1, 1.0, 2.0)

    def test_needs_ordered_depth_bounds(self, tiny_camera):
        with pytest.raises(ValueError, match="z_near"):
            mpi_from_rgbd(flat_frame(1.5, tiny_camera), 4, 2.0, 1.0)
        with pytest.raises(ValueError, match="z_near"):
            mpi_from_rgbd(flat_frame(1.5, tiny_camera), 4, -1.0, 2.0)
