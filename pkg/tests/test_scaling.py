"""Tests for metric scale estimation and volume rescaling."""

import numpy as np
import pytest

from lfcapture import (
    DEPTH_SENTINEL,
    DimensionMismatchError,
    InvalidScaleError,
    MpiLayer,
    MpiVolume,
    ScaleEstimateWarning,
    ScaleUndefinedError,
    compute_scale,
    mpi_from_rgbd,
    render,
    render_scene,
    rescale_mpi,
)


class TestComputeScale:
    def test_already_metric_gives_unity(self, rng):
        depth = rng.uniform(0.5, 3.0, (8, 10))
        assert compute_scale(depth, 1.0 / depth) == pytest.approx(1.0, rel=1e-12)

    def test_hand_evaluated_ratio(self):
        depth = np.full((4, 4), 2.0)
        disparity = np.ones((4, 4))
        # exp(ln 1 - ln 0.5) = 2
        assert compute_scale(depth, disparity) == pytest.approx(2.0, rel=1e-12)

    def test_geometric_mean_of_products(self):
        depth = np.ones((2, 4))
        disparity = np.ones((2, 4))
        disparity[:, :2] = 2.0
        disparity[:, 2:] = 8.0
        # geomean(2, 8) = 4
        assert compute_scale(depth, disparity) == pytest.approx(4.0, rel=1e-12)

    def test_sentinel_and_nonpositive_pixels_excluded(self):
        depth = np.full((2, 4), 2.0)
        depth[0, 0] = DEPTH_SENTINEL
        disparity = np.full((2, 4), 0.5)
        disparity[0, 1] = 0.0  # excluded
        assert compute_scale(depth, disparity) == pytest.approx(1.0, rel=1e-12)

    def test_no_valid_pixels_rejected(self):
        depth = np.full((3, 3), DEPTH_SENTINEL)
        with pytest.raises(ScaleUndefinedError):
            compute_scale(depth, np.ones((3, 3)))

    def test_warns_when_most_pixels_excluded(self):
        depth = np.full((2, 10), 2.0)
        disparity = np.zeros((2, 10))
        disparity[0, :3] = 0.5
        with pytest.warns(ScaleEstimateWarning):
            compute_scale(depth, disparity)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(DimensionMismatchError):
            compute_scale(np.ones((2, 2)), np.ones((3, 3)))

    def test_scale_equivariance_in_depth(self, rng):
        """Scaling the measured depths scales the estimate by the same factor."""
        depth = rng.uniform(0.5, 3.0, (6, 6))
        disparity = rng.uniform(0.3, 2.0, (6, 6))
        s = compute_scale(depth, disparity)
        assert compute_scale(3.0 * depth, disparity) == pytest.approx(3.0 * s, rel=1e-9)
        assert compute_scale(depth, disparity / 3.0) == pytest.approx(s / 3.0, rel=1e-9)


def checker_volume(depths, rng):
    layers = tuple(
        MpiLayer(
            color=rng.uniform(0, 1, (12, 16, 3)),
            density=rng.uniform(0.1, 2.0, (12, 16)),
            depth=z,
        )
        for z in depths
    )
    from lfcapture import CameraModel

    cam = CameraModel(f=40, cx=7.5, cy=5.5, width=16, height=12)
    return MpiVolume(layers=layers, reference=cam)


class TestRescale:
    def test_identity_scale(self, rng):
        mpi = checker_volume([1.0, 2.0, 4.0], rng)
        out = rescale_mpi(mpi, 1.0)
        np.testing.assert_array_equal(out.layer_depths, mpi.layer_depths)
        assert out.scale == mpi.scale

    def test_depths_scale_and_order_preserved(self, rng):
        mpi = checker_volume([1.0, 2.0, 4.0], rng)
        out = rescale_mpi(mpi, 2.0)
        np.testing.assert_allclose(out.layer_depths, [2.0, 4.0, 8.0])
        assert out.scale == pytest.approx(2.0)

    def test_render_at_reference_is_invariant(self, rng):
        mpi = checker_volume([1.0, 2.0, 4.0], rng)
        before = render(mpi, mpi.reference)
        after = render(rescale_mpi(mpi, 2.0), mpi.reference)
        np.testing.assert_allclose(after.color, before.color, atol=1e-6)
        np.testing.assert_allclose(after.alpha, before.alpha, atol=1e-6)

    def test_round_trip_restores_depths(self, rng):
        mpi = checker_volume([0.7, 1.9, 3.3], rng)
        back = rescale_mpi(rescale_mpi(mpi, 7.3), 1 / 7.3)
        np.testing.assert_allclose(back.layer_depths, mpi.layer_depths, rtol=1e-12)

    def test_nonpositive_scale_rejected(self, rng):
        mpi = checker_volume([1.0, 2.0], rng)
        with pytest.raises(InvalidScaleError):
            rescale_mpi(mpi, 0.0)
        with pytest.raises(InvalidScaleError):
            rescale_mpi(mpi, -2.0)


class TestScaleRecoveryPipeline:
    @pytest.mark.parametrize("true_scale", [0.5, 2.0, 7.3])
    def test_recovers_known_scale_through_binning(
        self, true_scale, small_camera, plane_scene
    ):
        """A volume built from normalized depth recovers the factor back to metric."""
        frame = render_scene(plane_scene, small_camera)
        from lfcapture import RgbdFrame

        normalized = RgbdFrame(
            rgb=frame.rgb, depth=frame.depth / true_scale, camera=frame.camera
        )
        mpi = mpi_from_rgbd(normalized, 8, 1.8 / true_scale, 2.2 / true_scale)
        view = render(mpi, small_camera)
        s = compute_scale(frame.depth, view.disparity)
        assert s == pytest.approx(true_scale, rel=0.01)
        rescaled = rescale_mpi(mpi, s)
        assert rescaled.scale == pytest.approx(s)
