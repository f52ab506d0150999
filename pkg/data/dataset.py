"""Synthetic training sets and their on-disk layout.

A dataset directory holds three containers per clip::

    clip_000.dvt         T x H x W x 3 frames
    clip_000_mask.dvt    T x H x W x 1 mask (0 = corrupted)
    clip_000_depth.dvt   T x H x W x 1 depth
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from data.io import read_clip, write_clip, write_frames_ppm, write_mask_pgm
from data.masks import MaskSpec, generate_masks
from data.synthetic import SyntheticScene, generate_clip
from numerics.rng import mix64
from utils.errors import DataError

logger = logging.getLogger(__name__)


@dataclass
class ClipSample:
    name: str
    frames: np.ndarray
    masks: np.ndarray
    depth: np.ndarray

    @property
    def length(self) -> int:
        return self.frames.shape[0]

    def validate(self) -> "ClipSample":
        t, h, w, c = self.frames.shape
        if c != 3 or self.masks.shape != (t, h, w, 1) or self.depth.shape != (t, h, w, 1):
            raise DataError(
                f"{self.name}: inconsistent shapes frames={self.frames.shape}, "
                f"masks={self.masks.shape}, depth={self.depth.shape}"
            )
        return self


def build_dataset(config) -> list[ClipSample]:
    """Synthesize ``data.num_clips`` clips with seeds derived from ``training.seed``."""
    d = config.data
    samples = []
    for i in range(d.num_clips):
        scene_seed = mix64(config.seed * 1000 + 2 * i)
        mask_seed = mix64(config.seed * 1000 + 2 * i + 1)
        scene = SyntheticScene(seed=scene_seed, num_polyps=d.num_polyps, camera_drift=d.camera_drift,
                               polyp_speed=d.polyp_speed, texture_speed=d.texture_speed)
        frames, depth = generate_clip(scene, d.clip_frames, d.height, d.width)
        masks = generate_masks(MaskSpec(seed=mask_seed, fraction=d.mask_fraction), d.clip_frames, d.height, d.width)
        samples.append(ClipSample(f"clip_{i:03d}", frames, masks, depth))
    logger.info(f"Synthesized {len(samples)} clips of {d.clip_frames}x{d.height}x{d.width}")
    return samples


def save_dataset(directory, samples: list[ClipSample], ppm: bool = False) -> list[Path]:
    directory = Path(directory)
    written = []
    for s in samples:
        written.append(write_clip(directory / f"{s.name}.dvt", s.frames))
        written.append(write_clip(directory / f"{s.name}_mask.dvt", s.masks))
        written.append(write_clip(directory / f"{s.name}_depth.dvt", s.depth))
        if ppm:
            write_frames_ppm(directory / s.name, s.frames)
            write_mask_pgm(directory / s.name, s.masks)
    logger.info(f"Wrote {len(samples)} clips to {directory}")
    return written


def load_dataset(directory) -> list[ClipSample]:
    """Read every ``clip_*.dvt`` triple from ``directory``."""
    directory = Path(directory)
    if not directory.is_dir():
        raise DataError(f"Dataset directory not found: {directory}")
    names = sorted(
        p.stem for p in directory.glob("*.dvt")
        if not p.stem.endswith("_mask") and not p.stem.endswith("_depth")
    )
    if not names:
        raise DataError(f"No clips in {directory}")
    samples = []
    for name in names:
        samples.append(ClipSample(
            name,
            read_clip(directory / f"{name}.dvt"),
            read_clip(directory / f"{name}_mask.dvt"),
            read_clip(directory / f"{name}_depth.dvt"),
        ).validate())
    return samples
