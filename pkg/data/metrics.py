"""Crop metrics: MSE / PSNR / SSIM over corrupted pixels only, on the 0-255 scale.

Clips are T x H x W x C in [0, 1]; masks T x H x W x 1 with 0 = corrupted.
A corrupted pixel contributes all of its channels.
"""

from __future__ import annotations

import logging
from typing import Optional

import numpy as np
from scipy.ndimage import gaussian_filter

from utils.errors import ContractError

logger = logging.getLogger(__name__)

PIXEL_MAX = 255.0
PSNR_CAP = 99.0
SSIM_SIGMA = 1.5
SSIM_RADIUS = 5  # 11-tap window
SSIM_K1 = 0.01
SSIM_K2 = 0.03


def _corrupted_selection(pred: np.ndarray, truth: np.ndarray, mask: np.ndarray) -> np.ndarray:
    pred, truth, mask = np.asarray(pred), np.asarray(truth), np.asarray(mask)
    if pred.shape != truth.shape:
        raise ContractError(f"Prediction {pred.shape} and truth {truth.shape} differ in shape")
    if mask.shape != pred.shape[:-1] + (1,):
        raise ContractError(f"Mask shape {mask.shape} does not match clip {pred.shape}")
    selection = np.broadcast_to(mask == 0, pred.shape)
    if not selection.any():
        raise ContractError("Mask has no corrupted pixels; crop metrics are undefined")
    return selection


def mse_crop(pred, truth, mask) -> float:
    """Mean squared error over corrupted pixels, values scaled by 255."""
    selection = _corrupted_selection(pred, truth, mask)
    diff = (np.asarray(pred, dtype=np.float64) - np.asarray(truth, dtype=np.float64)) * PIXEL_MAX
    return float(np.mean(diff[selection] ** 2))


def psnr_from_mse(mse: float) -> float:
    """PSNR in dB; only a zero error maps to the 99 dB cap."""
    if mse < 0.0:
        raise ContractError(f"MSE must be non-negative, got {mse}")
    if mse == 0.0:
        return PSNR_CAP
    return float(10.0 * np.log10(PIXEL_MAX ** 2 / mse))


def psnr_crop(pred, truth, mask) -> float:
    """10 log10(255^2 / mse_crop) dB; identical inputs return the 99 dB cap."""
    return psnr_from_mse(mse_crop(pred, truth, mask))


def ssim_map(pred: np.ndarray, truth: np.ndarray) -> np.ndarray:
    """Per-pixel SSIM of T x H x W x C clips on the 0-255 scale.

    Gaussian window sigma 1.5, 11 taps, reflected borders, filtered per frame and channel.
    """
    x = np.asarray(pred, dtype=np.float64) * PIXEL_MAX
    y = np.asarray(truth, dtype=np.float64) * PIXEL_MAX
    sigma = (0.0, SSIM_SIGMA, SSIM_SIGMA, 0.0)
    truncate = SSIM_RADIUS / SSIM_SIGMA

    def blur(a: np.ndarray) -> np.ndarray:
        return gaussian_filter(a, sigma=sigma, truncate=truncate, mode="reflect")

    c1 = (SSIM_K1 * PIXEL_MAX) ** 2
    c2 = (SSIM_K2 * PIXEL_MAX) ** 2
    mu_x, mu_y = blur(x), blur(y)
    var_x = blur(x * x) - mu_x ** 2
    var_y = blur(y * y) - mu_y ** 2
    cov = blur(x * y) - mu_x * mu_y
    num = (2 * mu_x * mu_y + c1) * (2 * cov + c2)
    den = (mu_x ** 2 + mu_y ** 2 + c1) * (var_x + var_y + c2)
    return num / den


def ssim_crop(pred, truth, mask) -> float:
    """Mean SSIM over windows centred on corrupted pixels (neighbours may be valid)."""
    selection = _corrupted_selection(pred, truth, mask)
    return float(np.mean(ssim_map(pred, truth)[selection]))


def depth_rmse(pred_depth, true_depth, mask: Optional[np.ndarray] = None) -> float:
    """Depth RMSE on the [0, 1] scale; with ``mask`` only over corrupted pixels."""
    pred_depth = np.asarray(pred_depth, dtype=np.float64)
    true_depth = np.asarray(true_depth, dtype=np.float64)
    if pred_depth.shape != true_depth.shape:
        raise ContractError(f"Depth shapes differ: {pred_depth.shape} vs {true_depth.shape}")
    diff = pred_depth - true_depth
    if mask is not None:
        diff = diff[_corrupted_selection(pred_depth, true_depth, mask)]
    return float(np.sqrt(np.mean(diff ** 2)))


def crop_metrics(pred, truth, mask) -> dict[str, float]:
    """All three crop metrics as one record."""
    mse = mse_crop(pred, truth, mask)
    return {
        "psnr_crop": psnr_from_mse(mse),
        "ssim_crop": ssim_crop(pred, truth, mask),
        "mse_crop": mse,
    }
