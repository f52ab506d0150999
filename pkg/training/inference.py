"""Windowed inference over whole videos.

Every window holds ``window`` target frames plus ``references`` reference
frames sampled near it: from both sides in offline mode, from strictly
earlier frames in online mode. The network output for the targets is
composited with the input, so valid pixels pass through untouched.
"""

from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass

import numpy as np

from model.generator import Generator, composite
from numerics import SplitMix64
from utils.errors import ConfigurationError, DataError

logger = logging.getLogger(__name__)

REFERENCE_STREAM = 23
MODES = ("offline", "online")


@dataclass
class WindowTiming:
    window: int
    start: int
    frames: list[int]
    seconds: float

    def to_record(self) -> dict:
        return asdict(self)


def window_starts(length: int, window: int) -> list[int]:
    """Starts 0, W, 2W, ...; a trailing partial window is shifted to end at the last frame."""
    if length < window:
        raise DataError(f"Video has {length} frames, need at least {window}")
    starts = list(range(0, length - window + 1, window))
    if starts[-1] + window < length:
        starts.append(length - window)
    return starts


def reference_candidates(start: int, window: int, length: int, mode: str, radius: int) -> np.ndarray:
    """Indices eligible as references for the window starting at ``start``."""
    lo = max(0, start - radius)
    if mode == "online":
        return np.arange(lo, start)
    if mode != "offline":
        raise ConfigurationError(f"Unknown inference mode '{mode}', expected one of {MODES}")
    hi = min(length, start + window + radius)
    candidates = np.arange(lo, hi)
    return candidates[(candidates < start) | (candidates >= start + window)]


def sample_references(start: int, window: int, length: int, mode: str, count: int = 10,
                      radius: int = 30, seed: int = 0) -> np.ndarray:
    """``count`` sorted reference indices.

    When fewer candidates exist, all are used and the earliest one (or the
    window start when there is none) is duplicated to fill up.
    """
    candidates = reference_candidates(start, window, length, mode, radius)
    if count == 0:
        return np.zeros(0, dtype=np.int64)
    if len(candidates) >= count:
        rng = SplitMix64.derive(seed, REFERENCE_STREAM, start)
        return candidates[rng.sample_without_replacement(len(candidates), count)]
    fill = candidates[0] if len(candidates) else start
    logger.warning(f"window at {start}: {len(candidates)} reference candidates, duplicating frame {fill}")
    padded = np.concatenate([np.full(count - len(candidates), fill, dtype=np.int64), candidates])
    return np.sort(padded)


def run_window(generator: Generator, frames: np.ndarray, masks: np.ndarray, targets: np.ndarray,
               references: np.ndarray) -> np.ndarray:
    """Inpaint ``targets`` using ``references`` as extra context; returns composited target frames."""
    idx = np.concatenate([targets, references]).astype(np.int64)
    frames_hat, _ = generator(frames[idx], masks[idx])
    n = len(targets)
    return composite(frames[targets], masks[targets], frames_hat.data[:n])


def infer_window(generator: Generator, frames: np.ndarray, masks: np.ndarray, mode: str = "offline",
                 window: int = 5, references: int = 10, radius: int = 30, seed: int = 0,
                 timings: list | None = None) -> np.ndarray:
    """Inpaint a whole T x H x W x 3 video window by window.

    Args:
        generator: Trained network (switched to eval mode here)
        frames: Corrupted video in [0, 1]
        masks: T x H x W x 1, 0 = corrupted
        mode: "offline" (references from both sides) or "online" (past frames only)
        window: Target frames per window
        references: Reference frames per window
        radius: Neighbourhood radius for reference sampling
        seed: Seed of the reference streams
        timings: Optional list receiving one ``WindowTiming`` per window

    Returns:
        Video of the same shape, frames in input order

    Raises:
        DataError: If the video is shorter than one window
    """
    frames = np.asarray(frames)
    masks = np.asarray(masks)
    if frames.shape[:-1] + (1,) != masks.shape:
        raise DataError(f"Mask shape {masks.shape} does not match video {frames.shape}")
    if mode not in MODES:
        raise ConfigurationError(f"Unknown inference mode '{mode}', expected one of {MODES}")
    length = frames.shape[0]
    generator.eval()
    output = np.array(frames, copy=True)
    done = np.zeros(length, dtype=bool)
    for k, start in enumerate(window_starts(length, window)):
        t0 = time.perf_counter()
        targets = np.arange(start, start + window)
        refs = sample_references(start, window, length, mode, references, radius, seed)
        result = run_window(generator, frames, masks, targets, refs)
        fresh = ~done[targets]
        output[targets[fresh]] = result[fresh]
        done[targets] = True
        elapsed = time.perf_counter() - t0
        if timings is not None:
            timings.append(WindowTiming(k, int(start), [int(i) for i in targets[fresh]], elapsed))
        logger.debug(f"window {k} at {start}: {int(fresh.sum())} frames in {elapsed:.3f}s")
    logger.info(f"Inpainted {length} frames in {mode} mode")
    return output
