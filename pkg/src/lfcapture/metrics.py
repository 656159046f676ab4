"""Image quality metrics over float images in [0, 1]."""

from __future__ import annotations

import math

import numpy as np
from scipy.ndimage import gaussian_filter

from .errors import DimensionMismatchError

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    """Peak signal-to-noise ratio in dB for unit-range images.

    Identical images return ``math.inf``.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"image shapes differ: {a.shape} vs {b.shape}")
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(1.0 / mse)


def _ssim_single(a: np.ndarray, b: np.ndarray, data_range: float) -> float:
    # Gaussian window truncated to the standard 11-tap kernel at sigma 1.5.
    truncate = (SSIM_WINDOW - 1) / 2 / SSIM_SIGMA
    blur = lambda img: gaussian_filter(img, SSIM_SIGMA, truncate=truncate, mode="constant")

    mu_a = blur(a)
    mu_b = blur(b)
    var_a = blur(a * a) - mu_a * mu_a
    var_b = blur(b * b) - mu_b * mu_b
    cov = blur(a * b) - mu_a * mu_b

    c1 = (SSIM_K1 * data_range) ** 2
    c2 = (SSIM_K2 * data_range) ** 2
    ssim_map = ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) / (
        (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    )
    pad = (SSIM_WINDOW - 1) // 2
    return float(ssim_map[pad:-pad, pad:-pad].mean())


def ssim(a: np.ndarray, b: np.ndarray, data_range: float = 1.0) -> float:
    """Structural similarity with a Gaussian window, mean over valid pixels.

    Grayscale inputs give the plain score; color inputs average the
    per-channel scores. Only pixels whose window lies fully inside the image
    participate in the mean.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"image shapes differ: {a.shape} vs {b.shape}")
    if a.ndim == 2:
        return _ssim_single(a, b, data_range)
    if a.ndim != 3:
        raise DimensionMismatchError(f"expected (H, W) or (H, W, C), got {a.shape}")
    scores = [_ssim_single(a[..., c], b[..., c], data_range) for c in range(a.shape[2])]
    return float(np.mean(scores))
