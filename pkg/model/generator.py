"""The inpainting network: encoder, transformer stack with depth head, fusion, decoder.

Example:
    >>> rng = SplitMix64.derive(7, 0)
    >>> gen = Generator(rng, base_channels=8, num_blocks=2)
    >>> frames_hat, depth_hat = gen(frames, masks)   # T x H x W x 3, T x H x W x 1
"""

from __future__ import annotations

import logging

import numpy as np

from model.bmpcf import BMPCF
from model.codec import Decoder, DecoderSpec, Encoder, EncoderSpec, decode_frames, encode_frames
from model.stgde import STGDE, PatchGrid
from numerics import Array, Module, SplitMix64, as_array
from utils.errors import ContractError

logger = logging.getLogger(__name__)


def apply_mask(frames: Array, masks: np.ndarray) -> Array:
    """X_M = X * M with M broadcast over colour channels."""
    m = np.asarray(masks)
    if m.shape != frames.shape[:-1] + (1,):
        raise ContractError(f"Mask shape {m.shape} does not match clip {frames.shape}")
    return frames * Array(m, dtype=frames.dtype.type)


class Generator(Module):
    """Maps a corrupted clip and its mask to (inpainted frames, estimated depth).

    Args:
        rng: Initialization stream
        base_channels: C; latent features carry c = 4C channels
        num_blocks: N_s transformer blocks
        grid: Patch grid for attention
        mask_rule: "additive" or "multiplicative" masking of attention scores
        depth_blocks: "all", "first_half" or "last_half"
        fusion: "paired" or "concat"
        fusion_kernel: 3 (default) or 1
        ffn_expansion: Hidden width factor of the feed-forward network
    """

    def __init__(self, rng: SplitMix64, base_channels: int = 8, num_blocks: int = 8,
                 grid: PatchGrid = PatchGrid(), mask_rule: str = "additive", depth_blocks: str = "all",
                 fusion: str = "paired", fusion_kernel: int = 3, ffn_expansion: int = 4):
        super().__init__()
        self.base_channels = base_channels
        self.encoder = Encoder(EncoderSpec(base_channels, in_channels=3), rng)
        self.stgde = STGDE(4 * base_channels, num_blocks, base_channels, rng, grid=grid,
                           ffn_expansion=ffn_expansion, mask_rule=mask_rule, depth_blocks=depth_blocks)
        self.bmpcf = BMPCF(base_channels, rng, kernel_size=fusion_kernel, mode=fusion)
        self.decoder = Decoder(DecoderSpec(base_channels, out_channels=3), rng)

    def forward(self, frames, masks) -> tuple[Array, Array]:
        frames = as_array(frames)
        batched = frames.ndim == 5
        clip = frames if batched else frames.reshape((1,) + frames.shape)
        m = np.asarray(masks)
        m = m if m.ndim == 5 else m[None]
        b, t = clip.shape[:2]

        x_masked = apply_mask(clip, m)
        features = encode_frames(x_masked, self.encoder)
        f_visual, depth = self.stgde(features, m, frames=t, batch=b)
        fused = self.bmpcf(f_visual, depth)
        frames_hat = decode_frames(fused, self.decoder, batch=b, squeeze=False)
        if not batched:
            frames_hat = frames_hat.reshape(frames_hat.shape[1:])
            depth = depth.reshape(depth.shape[1:])
        return frames_hat, depth


def composite(frames, masks, frames_hat) -> np.ndarray:
    """M * X + (1 - M) * Y_hat: valid pixels come from the input untouched."""
    x = frames.data if isinstance(frames, Array) else np.asarray(frames)
    y = frames_hat.data if isinstance(frames_hat, Array) else np.asarray(frames_hat)
    m = np.asarray(masks).astype(bool)
    return np.where(m, x, y.astype(x.dtype))
