"""Clip containers and PPM/PGM frame directories.

Container layout (all integers little-endian)::

    offset  0  magic  b"DVT1"
    offset  4  u32    T
    offset  8  u32    H
    offset 12  u32    W
    offset 16  u32    C
    offset 20  T*C*H*W float32 LE, planar per frame (frame, channel, row, column)

Clips in memory are channels-last T x H x W x C.
"""

from __future__ import annotations

import logging
import struct
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from utils.errors import DataError, FormatError

logger = logging.getLogger(__name__)

MAGIC = b"DVT1"
HEADER = struct.Struct("<4s4I")
MAX_ELEMENTS = 1 << 32


def encode_clip(clip: np.ndarray) -> bytes:
    clip = np.asarray(clip)
    if clip.ndim != 4:
        raise DataError(f"Container holds T x H x W x C clips, got shape {clip.shape}")
    t, h, w, c = clip.shape
    planar = np.ascontiguousarray(clip.transpose(0, 3, 1, 2), dtype="<f4")
    return HEADER.pack(MAGIC, t, h, w, c) + planar.tobytes()


def decode_clip(payload: bytes) -> np.ndarray:
    """Parse container bytes.

    Raises:
        FormatError: Bad magic (offset of the first wrong byte), short header,
            extent overflow or payload length mismatch
    """
    if len(payload) < HEADER.size:
        if payload[:4] != MAGIC[:len(payload[:4])]:
            raise FormatError("Bad container magic", offset=_first_mismatch(payload[:4]))
        raise FormatError(f"Truncated header: {len(payload)} of {HEADER.size} bytes", offset=len(payload))
    magic, t, h, w, c = HEADER.unpack_from(payload, 0)
    if magic != MAGIC:
        raise FormatError(f"Bad container magic {magic!r}", offset=_first_mismatch(magic))
    count = t * h * w * c
    if count > MAX_ELEMENTS:
        raise FormatError(f"Extents {t}x{h}x{w}x{c} overflow the container limit", offset=4)
    expected = HEADER.size + 4 * count
    if len(payload) < expected:
        raise FormatError(
            f"Truncated payload: expected {expected} bytes for {t}x{h}x{w}x{c}, got {len(payload)}",
            offset=len(payload),
        )
    if len(payload) > expected:
        raise FormatError(f"{len(payload) - expected} trailing bytes after payload", offset=expected)
    planar = np.frombuffer(payload, dtype="<f4", count=count, offset=HEADER.size).reshape(t, c, h, w)
    return planar.transpose(0, 2, 3, 1).astype(np.float32)


def _first_mismatch(magic: bytes) -> int:
    for i, (got, want) in enumerate(zip(magic, MAGIC)):
        if got != want:
            return i
    return len(magic)


def write_clip(path, clip: np.ndarray) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_clip(clip))
    logger.debug(f"wrote {path} {np.asarray(clip).shape}")
    return path


def read_clip(path) -> np.ndarray:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"Clip file not found: {path}")
    try:
        return decode_clip(path.read_bytes())
    except FormatError as e:
        raise FormatError(f"{path}: {e.detail}", offset=e.offset) from None


def quantize(values: np.ndarray) -> np.ndarray:
    """[0, 1] -> uint8 via round(x * 255)."""
    return np.clip(np.rint(np.asarray(values, dtype=np.float64) * 255.0), 0, 255).astype(np.uint8)


def write_frames_ppm(directory, clip: np.ndarray) -> list[Path]:
    """One binary PPM (P6) per frame: ``frame_0000.ppm`` ..."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    clip = np.asarray(clip)
    if clip.ndim != 4 or clip.shape[-1] != 3:
        raise DataError(f"PPM export needs a T x H x W x 3 clip, got {clip.shape}")
    paths = []
    for t, frame in enumerate(quantize(clip)):
        path = directory / f"frame_{t:04d}.ppm"
        Image.fromarray(frame).save(path, format="PPM")
        paths.append(path)
    return paths


def write_mask_pgm(directory, masks: np.ndarray) -> list[Path]:
    """One binary PGM (P5) per frame: 0 = corrupted, 255 = valid."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    masks = np.asarray(masks)
    paths = []
    for t, mask in enumerate(quantize(masks[..., 0])):
        path = directory / f"mask_{t:04d}.pgm"
        Image.fromarray(mask).save(path, format="PPM")
        paths.append(path)
    return paths


def _read_images(directory, pattern: str, mode: str) -> list[np.ndarray]:
    directory = Path(directory)
    paths = sorted(directory.glob(pattern))
    if not paths:
        raise DataError(f"No files matching {pattern} in {directory}")
    images = []
    for path in paths:
        try:
            with Image.open(path) as img:
                if img.mode != mode:
                    raise FormatError(f"{path}: expected {mode} image, got {img.mode}", offset=0)
                images.append(np.asarray(img))
        except (UnidentifiedImageError, OSError) as e:
            raise FormatError(f"{path}: {e}", offset=0) from e
    shapes = {im.shape for im in images}
    if len(shapes) != 1:
        raise FormatError(f"Frames in {directory} differ in size: {sorted(shapes)}", offset=0)
    return images


def read_frames_ppm(directory) -> np.ndarray:
    images = _read_images(directory, "frame_*.ppm", "RGB")
    return (np.stack(images).astype(np.float32) / 255.0).astype(np.float32)


def read_mask_pgm(directory) -> np.ndarray:
    """Values above 127 are valid (1), the rest corrupted (0)."""
    images = _read_images(directory, "mask_*.pgm", "L")
    return (np.stack(images) > 127).astype(np.float32)[..., None]
