"""Endoscopy-like synthetic clips with analytic, pixel-aligned depth.

The scene is the inside of a tube seen along its axis: depth grows with
the distance from the (drifting) tube centre, a few disk-shaped polyps
bulge towards the camera, and a sinusoidal mucosa texture slides across
the wall. Every random quantity comes from ``SplitMix64`` streams derived
from the scene seed, so a seed fully determines the clip.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from numerics import SplitMix64
from utils.errors import ConfigurationError

logger = logging.getLogger(__name__)

DEPTH_NEAR = 0.1
DEPTH_SPAN = 0.85


@dataclass(frozen=True)
class SyntheticScene:
    """Seeded scene parameters.

    Speeds are in normalized image units ([-1, 1] across the frame) per frame.
    """

    seed: int = 0
    num_polyps: int = 3
    camera_drift: float = 0.02
    polyp_speed: float = 0.01
    texture_speed: float = 0.3
    polyp_height: float = 0.2
    texture_amplitude: float = 0.08


@dataclass(frozen=True)
class _Polyp:
    cy: float
    cx: float
    vy: float
    vx: float
    radius: float
    tint: float


def _draw_polyps(scene: SyntheticScene) -> list[_Polyp]:
    rng = SplitMix64.derive(scene.seed, 2)
    polyps = []
    for _ in range(scene.num_polyps):
        radius_pos = rng.uniform(None, 0.3, 0.7)
        angle = rng.uniform(None, 0.0, 2 * np.pi)
        heading = rng.uniform(None, 0.0, 2 * np.pi)
        polyps.append(_Polyp(
            cy=radius_pos * np.sin(angle),
            cx=radius_pos * np.cos(angle),
            vy=np.sin(heading),
            vx=np.cos(heading),
            radius=rng.uniform(None, 0.08, 0.18),
            tint=rng.uniform(None, 0.05, 0.15),
        ))
    return polyps


def _grid(height: int, width: int) -> tuple[np.ndarray, np.ndarray]:
    ys = (np.arange(height, dtype=np.float64) + 0.5) / height * 2.0 - 1.0
    xs = (np.arange(width, dtype=np.float64) + 0.5) / width * 2.0 - 1.0
    return np.meshgrid(ys, xs, indexing="ij")


def radial_depth(yy: np.ndarray, xx: np.ndarray, cy: float = 0.0, cx: float = 0.0) -> np.ndarray:
    """Tube depth before polyps: near at the axis, far towards the corners."""
    r = np.sqrt((yy - cy) ** 2 + (xx - cx) ** 2) / np.sqrt(2.0)
    return DEPTH_NEAR + DEPTH_SPAN * np.clip(r, 0.0, 1.0)


def generate_clip(scene: SyntheticScene, frames: int, height: int, width: int) -> tuple[np.ndarray, np.ndarray]:
    """Render ``frames`` frames of the scene.

    Args:
        scene: Scene parameters
        frames: T >= 1
        height: H, divisible by 4
        width: W, divisible by 4

    Returns:
        (clip T x H x W x 3, depth T x H x W x 1), float32 in [0, 1]

    Raises:
        ConfigurationError: On invalid extents
    """
    if frames < 1:
        raise ConfigurationError(f"Clip needs at least one frame, got {frames}")
    if height < 4 or width < 4 or height % 4 or width % 4:
        raise ConfigurationError(f"Frame size {height}x{width} must be positive multiples of 4")

    rng = SplitMix64.derive(scene.seed, 1)
    drift_heading = rng.uniform(None, 0.0, 2 * np.pi)
    tex_angle = rng.uniform(None, 0.0, np.pi)
    tex_freq = rng.uniform(None, 6.0, 12.0)
    tex_phase = rng.uniform(None, 0.0, 2 * np.pi)
    base_color = np.array([0.78, 0.42, 0.38]) + rng.uniform(3, -0.05, 0.05)
    polyps = _draw_polyps(scene)

    yy, xx = _grid(height, width)
    clip = np.empty((frames, height, width, 3), dtype=np.float64)
    depth = np.empty((frames, height, width, 1), dtype=np.float64)
    for t in range(frames):
        cy = scene.camera_drift * t * np.sin(drift_heading)
        cx = scene.camera_drift * t * np.cos(drift_heading)
        d = radial_depth(yy, xx, cy, cx)
        bump = np.zeros_like(d)
        tint = np.zeros_like(d)
        for p in polyps:
            py = p.cy + scene.polyp_speed * t * p.vy
            px = p.cx + scene.polyp_speed * t * p.vx
            g = np.exp(-((yy - py) ** 2 + (xx - px) ** 2) / (2.0 * p.radius ** 2))
            bump = np.maximum(bump, g)
            tint = np.maximum(tint, g * p.tint)
        d = np.clip(d - scene.polyp_height * bump, 0.0, 1.0)

        u = xx * np.cos(tex_angle) + yy * np.sin(tex_angle)
        texture = scene.texture_amplitude * np.sin(tex_freq * u + tex_phase + scene.texture_speed * t)
        shade = 1.0 - 0.55 * d
        rgb = base_color[None, None, :] * shade[..., None] + texture[..., None] + tint[..., None]
        clip[t] = np.clip(rgb, 0.0, 1.0)
        depth[t, ..., 0] = d
    logger.debug(f"rendered scene seed={scene.seed}: {frames}x{height}x{width}")
    return clip.astype(np.float32), depth.astype(np.float32)
