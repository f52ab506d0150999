"""Corruption masks: specular-style blobs and instrument-style bars.

Shapes are drawn as a smooth, unclamped score field that drifts from frame
to frame; in each frame the ``round(p * H * W)`` highest-scoring pixels are
marked corrupted. The corrupted fraction is therefore exact up to rounding
and the mask follows the shapes smoothly through time.

Convention: 0 = corrupted, 1 = valid.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from numerics import SplitMix64
from utils.errors import ConfigurationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MaskSpec:
    """Seeded mask parameters; sizes and speeds in normalized units ([-1, 1] per axis)."""

    seed: int = 0
    fraction: float = 0.08
    blob_count: tuple[int, int] = (2, 4)
    blob_radius: tuple[float, float] = (0.05, 0.15)
    bar_count: tuple[int, int] = (0, 1)
    bar_width: tuple[float, float] = (0.04, 0.08)
    drift: float = 0.03

    def __post_init__(self):
        if not 0.0 <= self.fraction < 0.5:
            raise ConfigurationError(
                f"Corrupted fraction must lie in [0, 0.5) to leave majority context, got {self.fraction}"
            )


class _Blob:
    """Gaussian bump moving on a straight line."""

    def __init__(self, rng: SplitMix64, spec: MaskSpec):
        self.cy, self.cx = rng.uniform(2, -0.8, 0.8)
        heading = rng.uniform(None, 0.0, 2 * np.pi)
        self.vy, self.vx = np.sin(heading) * spec.drift, np.cos(heading) * spec.drift
        self.radius = rng.uniform(None, *spec.blob_radius)

    def score(self, yy: np.ndarray, xx: np.ndarray, t: int) -> np.ndarray:
        cy, cx = self.cy + self.vy * t, self.cx + self.vx * t
        return np.exp(-((yy - cy) ** 2 + (xx - cx) ** 2) / (2.0 * self.radius ** 2))


class _Bar:
    """Rotating straight band entering from the frame border, like an instrument shaft."""

    def __init__(self, rng: SplitMix64, spec: MaskSpec):
        self.angle = rng.uniform(None, 0.0, np.pi)
        self.offset = rng.uniform(None, -0.5, 0.5)
        self.spin = rng.uniform(None, -1.0, 1.0) * spec.drift
        self.width = rng.uniform(None, *spec.bar_width)

    def score(self, yy: np.ndarray, xx: np.ndarray, t: int) -> np.ndarray:
        angle = self.angle + self.spin * t
        distance = yy * np.cos(angle) - xx * np.sin(angle) - self.offset
        return np.exp(-(distance ** 2) / (2.0 * self.width ** 2))


def _shapes(spec: MaskSpec) -> list:
    rng = SplitMix64.derive(spec.seed, 3)
    n_blobs = rng.integers(spec.blob_count[0], spec.blob_count[1] + 1)
    n_bars = rng.integers(spec.bar_count[0], spec.bar_count[1] + 1)
    return [_Blob(rng, spec) for _ in range(n_blobs)] + [_Bar(rng, spec) for _ in range(n_bars)]


def generate_masks(spec: MaskSpec, frames: int, height: int, width: int) -> np.ndarray:
    """Binary T x H x W x 1 float32 mask with ``round(p * H * W)`` zeros per frame.

    Raises:
        ConfigurationError: On invalid extents
    """
    if frames < 1 or height < 1 or width < 1:
        raise ConfigurationError(f"Invalid mask extents {frames}x{height}x{width}")
    masks = np.ones((frames, height, width, 1), dtype=np.float32)
    k = int(round(spec.fraction * height * width))
    if k == 0:
        return masks

    ys = (np.arange(height, dtype=np.float64) + 0.5) / height * 2.0 - 1.0
    xs = (np.arange(width, dtype=np.float64) + 0.5) / width * 2.0 - 1.0
    yy, xx = np.meshgrid(ys, xs, indexing="ij")
    shapes = _shapes(spec)
    # weak tilted ramp keeps ties out of the ranking far from every shape
    ramp = 1e-6 * (yy + 0.37 * xx)
    for t in range(frames):
        score = ramp.copy()
        for shape in shapes:
            score += shape.score(yy, xx, t)
        order = np.argsort(-score.reshape(-1), kind="stable")
        flat = masks[t, ..., 0].reshape(-1)
        flat[order[:k]] = 0.0
        masks[t, ..., 0] = flat.reshape(height, width)
    logger.debug(f"masks seed={spec.seed}: {len(shapes)} shapes, {k} corrupted pixels per frame")
    return masks


def corrupted_fraction(masks: np.ndarray) -> float:
    return float(np.mean(np.asarray(masks) == 0))
