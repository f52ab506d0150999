"""Checkpoint files.

Layout (little-endian)::

    b"DVCK"
    u32  format version (1)
    64   ASCII hex SHA-256 of the architecture config
    u64  iteration
    u64  seed (batch and reference streams are derived from it)
    u64  generator Adam step
    u64  discriminator Adam step
    u32  number of blocks, then per block:
         u16 name length, name (UTF-8), u8 dtype code (0 float32, 1 float64),
         u8 ndim, ndim x u32 extents, raw array bytes

Block names: ``G.<param>``, ``D.<param or buffer>``, ``optG.m.<param>``,
``optG.v.<param>``, ``optD.m.<param>``, ``optD.v.<param>``.
"""

from __future__ import annotations

import logging
import struct
from pathlib import Path

import numpy as np

from utils.errors import ConfigurationError, FormatError

logger = logging.getLogger(__name__)

MAGIC = b"DVCK"
VERSION = 1
_PREAMBLE = struct.Struct("<4sI64sQQQQI")
_DTYPES = {0: np.dtype("<f4"), 1: np.dtype("<f8")}
_CODES = {np.dtype("float32"): 0, np.dtype("float64"): 1}


def _blocks(trainer) -> dict[str, np.ndarray]:
    blocks: dict[str, np.ndarray] = {}
    for prefix, module in trainer.modules().items():
        for name, value in module.state_dict().items():
            blocks[f"{prefix}.{name}"] = np.asarray(value)
    for prefix, state in (("optG", trainer.gen_state), ("optD", trainer.disc_state)):
        for name in sorted(state.m):
            blocks[f"{prefix}.m.{name}"] = state.m[name]
            blocks[f"{prefix}.v.{name}"] = state.v[name]
    return blocks


def encode_checkpoint(trainer) -> bytes:
    blocks = _blocks(trainer)
    parts = [_PREAMBLE.pack(
        MAGIC, VERSION, trainer.config.config_hash().encode("ascii"), trainer.iteration,
        trainer.config.seed & (2 ** 64 - 1), trainer.gen_state.step, trainer.disc_state.step, len(blocks),
    )]
    for name, value in blocks.items():
        code = _CODES.get(value.dtype)
        if code is None:
            raise ConfigurationError(f"Cannot store {name} with dtype {value.dtype}")
        encoded = name.encode("utf-8")
        parts.append(struct.pack("<H", len(encoded)) + encoded)
        parts.append(struct.pack(f"<BB{value.ndim}I", code, value.ndim, *value.shape))
        parts.append(np.ascontiguousarray(value, dtype=_DTYPES[code]).tobytes())
    return b"".join(parts)


def decode_checkpoint(payload: bytes) -> dict:
    """Parse checkpoint bytes into header fields and named blocks.

    Raises:
        FormatError: With the byte offset where parsing failed
    """
    if len(payload) < _PREAMBLE.size:
        raise FormatError("Truncated checkpoint header", offset=len(payload))
    magic, version, config_hash, iteration, seed, g_step, d_step, count = _PREAMBLE.unpack_from(payload, 0)
    if magic != MAGIC:
        raise FormatError(f"Bad checkpoint magic {magic!r}", offset=0)
    if version != VERSION:
        raise FormatError(f"Unsupported checkpoint version {version}", offset=4)
    offset = _PREAMBLE.size
    blocks: dict[str, np.ndarray] = {}
    for _ in range(count):
        start = offset
        try:
            (name_len,) = struct.unpack_from("<H", payload, offset)
            offset += 2
            name = payload[offset:offset + name_len].decode("utf-8")
            offset += name_len
            code, ndim = struct.unpack_from("<BB", payload, offset)
            offset += 2
            shape = struct.unpack_from(f"<{ndim}I", payload, offset)
            offset += 4 * ndim
        except (struct.error, UnicodeDecodeError) as e:
            raise FormatError(f"Malformed block header: {e}", offset=start) from e
        if code not in _DTYPES:
            raise FormatError(f"Unknown dtype code {code} in block {name}", offset=offset - 2 - 4 * ndim)
        dtype = _DTYPES[code]
        nbytes = int(np.prod(shape, dtype=np.int64)) * dtype.itemsize
        if offset + nbytes > len(payload):
            raise FormatError(f"Block {name} runs past the end of the file", offset=len(payload))
        blocks[name] = np.frombuffer(payload, dtype=dtype, count=nbytes // dtype.itemsize,
                                     offset=offset).reshape(shape).astype(np.float32 if code == 0 else np.float64)
        offset += nbytes
    if offset != len(payload):
        raise FormatError(f"{len(payload) - offset} trailing bytes after the last block", offset=offset)
    return {
        "config_hash": config_hash.decode("ascii"),
        "iteration": iteration,
        "seed": seed,
        "gen_step": g_step,
        "disc_step": d_step,
        "blocks": blocks,
    }


def save_checkpoint(path, trainer) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_checkpoint(trainer))
    logger.info(f"Checkpoint written: {path} (iteration {trainer.iteration})")
    return path


def load_checkpoint(path, trainer) -> None:
    """Restore ``trainer`` in place.

    Raises:
        ConfigurationError: If the checkpoint was written for a different architecture
        FormatError: If the file is malformed
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"Checkpoint not found: {path}")
    parsed = decode_checkpoint(path.read_bytes())
    expected = trainer.config.config_hash()
    if parsed["config_hash"] != expected:
        raise ConfigurationError(
            f"{path} was written for architecture {parsed['config_hash'][:12]}, config gives {expected[:12]}"
        )
    blocks = parsed["blocks"]
    for prefix, module in trainer.modules().items():
        state = {name[len(prefix) + 1:]: value for name, value in blocks.items() if name.startswith(prefix + ".")}
        module.load_state_dict(state)
    for prefix, state in (("optG", trainer.gen_state), ("optD", trainer.disc_state)):
        for kind, target in (("m", state.m), ("v", state.v)):
            head = f"{prefix}.{kind}."
            for name, value in blocks.items():
                if name.startswith(head):
                    target[name[len(head):]] = value.copy()
    trainer.gen_state.step = parsed["gen_step"]
    trainer.disc_state.step = parsed["disc_step"]
    trainer.iteration = parsed["iteration"]
    if parsed["seed"] != trainer.config.seed & (2 ** 64 - 1):
        logger.warning(f"Checkpoint seed {parsed['seed']} differs from config seed {trainer.config.seed}; "
                       f"batches continue from the config seed")
    logger.info(f"Checkpoint loaded: {path} (iteration {trainer.iteration})")
