"""Training batch assembly.

Even iterations take ``frames`` consecutive frames, odd iterations take
``frames`` sorted random frames of one clip. All draws come from a stream
derived from (seed, iteration), so a batch depends on nothing else.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from numerics import SplitMix64
from utils.errors import DataError

logger = logging.getLogger(__name__)

BATCH_STREAM = 17


@dataclass
class Batch:
    frames: np.ndarray  # B x T x H x W x 3
    masks: np.ndarray  # B x T x H x W x 1
    depth: np.ndarray  # B x T x H x W x 1
    clip_ids: list[int] = field(default_factory=list)
    indices: list[np.ndarray] = field(default_factory=list)

    def __iter__(self):
        return iter((self.frames, self.masks, self.depth))

    @property
    def size(self) -> int:
        return self.frames.shape[0]


def frame_indices(length: int, iteration: int, window: int, rng: SplitMix64) -> np.ndarray:
    """Consecutive indices on even iterations, sorted random ones on odd iterations."""
    if length < window:
        raise DataError(f"Clip has {length} frames, need at least {window}")
    if iteration % 2 == 0:
        start = rng.integers(0, length - window + 1)
        return np.arange(start, start + window)
    return rng.sample_without_replacement(length, window)


def sample_batch(dataset, iteration: int, config) -> Batch:
    """Draw ``training.batch_size`` clips of ``training.frames`` frames.

    Raises:
        DataError: If the dataset is empty or a drawn clip is too short
    """
    if not dataset:
        raise DataError("Cannot sample from an empty dataset")
    rng = SplitMix64.derive(config.seed, BATCH_STREAM, iteration)
    window = config.training.frames
    frames, masks, depth, clip_ids, indices = [], [], [], [], []
    for _ in range(config.training.batch_size):
        clip_id = rng.integers(0, len(dataset))
        sample = dataset[clip_id]
        idx = frame_indices(sample.length, iteration, window, rng)
        frames.append(sample.frames[idx])
        masks.append(sample.masks[idx])
        depth.append(sample.depth[idx])
        clip_ids.append(clip_id)
        indices.append(idx)
    return Batch(np.stack(frames), np.stack(masks), np.stack(depth), clip_ids, indices)
