"""Tests for PSNR and SSIM against closed forms and a reference implementation."""

import math

import numpy as np
import pytest

from lfcapture import DimensionMismatchError, psnr, ssim


class TestPsnr:
    def test_identical_images_are_infinite(self, rng):
        img = rng.uniform(0, 1, (16, 16, 3))
        assert psnr(img, img) == math.inf

    def test_known_mse(self):
        a = np.zeros((8, 8, 3))
        b = np.full((8, 8, 3), 0.1)  # MSE exactly 0.01
        assert psnr(a, b) == pytest.approx(20.0, abs=1e-12)

    def test_matches_direct_formula(self, rng):
        a = rng.uniform(0, 1, (32, 24, 3))
        b = rng.uniform(0, 1, (32, 24, 3))
        expected = 10.0 * math.log10(1.0 / np.mean((a - b) ** 2))
        assert psnr(a, b) == pytest.approx(expected, abs=1e-9)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(DimensionMismatchError):
            psnr(np.zeros((4, 4)), np.zeros((4, 5)))


class TestSsim:
    def test_identical_images_score_one(self, rng):
        img = rng.uniform(0, 1, (32, 32, 3))
        assert ssim(img, img) == pytest.approx(1.0, abs=1e-12)

    def test_constant_images_closed_form(self):
        a = np.zeros((32, 32))
        b = np.ones((32, 32))
        # Means 0 and 1, zero variance: ((0 + C1)(0 + C2)) / ((0 + 1 + C1)(0 + C2)).
        c1 = 0.01**2
        expected = c1 / (1.0 + c1)
        assert ssim(a, b) == pytest.approx(expected, rel=1e-9)

    def test_matches_reference_implementation(self, rng):
        skimage_metrics = pytest.importorskip("skimage.metrics")
        for _ in range(3):
            a = rng.uniform(0, 1, (64, 64, 3))
            b = np.clip(a + rng.normal(0, 0.1, a.shape), 0, 1)
            ref = skimage_metrics.structural_similarity(
                a, b, channel_axis=-1, data_range=1.0,
                gaussian_weights=True, sigma=1.5, use_sample_covariance=False,
            )
            assert ssim(a, b) == pytest.approx(ref, abs=1e-4)

    def test_grayscale_matches_reference(self, rng):
        skimage_metrics = pytest.importorskip("skimage.metrics")
        a = rng.uniform(0, 1, (48, 48))
        b = np.clip(a + rng.normal(0, 0.05, a.shape), 0, 1)
        ref = skimage_metrics.structural_similarity(
            a, b, data_range=1.0, gaussian_weights=True, sigma=1.5,
            use_sample_covariance=False,
        )
        assert ssim(a, b) == pytest.approx(ref, abs=1e-4)

    def test_degrades_with_noise(self, rng):
        a = rng.uniform(0, 1, (32, 32, 3))
        slightly = np.clip(a + rng.normal(0, 0.02, a.shape), 0, 1)
        badly = np.clip(a + rng.normal(0, 0.3, a.shape), 0, 1)
        assert ssim(a, slightly) > ssim(a, badly)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(DimensionMismatchError):
            ssim(np.zeros((4, 4)), np.zeros((4, 5)))
