"""Frame encoder (X_M -> F at quarter resolution, 4C channels) and decoders.

Clips arrive channels-last, T x H x W x C or batched B x T x H x W x C;
inside the network they are folded to (B*T) x C x H x W.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from numerics import Array, Conv2d, Module, SplitMix64, ops
from utils.errors import ConfigurationError, ContractError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EncoderSpec:
    """Two stride-2 stages: C -> 2C -> 4C channels at H/4 x W/4."""

    base_channels: int = 8
    in_channels: int = 3

    @property
    def out_channels(self) -> int:
        return 4 * self.base_channels


@dataclass(frozen=True)
class DecoderSpec:
    """Mirror of the encoder ending in a sigmoid head with ``out_channels`` maps."""

    base_channels: int = 8
    out_channels: int = 3

    @property
    def in_channels(self) -> int:
        return 4 * self.base_channels


def clip_to_frames(clip: Array) -> tuple[Array, int, int]:
    """B x T x H x W x C (or T x H x W x C) -> (B*T) x C x H x W, B, T."""
    if clip.ndim == 4:
        clip = clip.reshape((1,) + clip.shape)
    if clip.ndim != 5:
        raise ContractError(f"Expected a T x H x W x C clip, got shape {clip.shape}")
    b, t, h, w, c = clip.shape
    frames = clip.reshape(b * t, h, w, c).transpose(0, 3, 1, 2)
    return frames, b, t


def frames_to_clip(frames: Array, batch: int, length: int, squeeze: bool) -> Array:
    """Inverse of ``clip_to_frames``."""
    n, c, h, w = frames.shape
    clip = frames.transpose(0, 2, 3, 1).reshape(batch, length, h, w, c)
    if squeeze:
        clip = clip.reshape(length, h, w, c)
    return clip


class Encoder(Module):
    """conv3x3 (in->C) + lrelu, conv3x3/2 (C->2C) + lrelu, conv3x3/2 (2C->4C) + lrelu."""

    def __init__(self, spec: EncoderSpec, rng: SplitMix64):
        super().__init__()
        self.spec = spec
        c = spec.base_channels
        self.layers = [
            Conv2d(spec.in_channels, c, 3, rng, stride=1, padding=1, pad_mode="edge"),
            Conv2d(c, 2 * c, 3, rng, stride=2, padding=1, pad_mode="edge"),
            Conv2d(2 * c, 4 * c, 3, rng, stride=2, padding=1, pad_mode="edge"),
        ]

    def forward(self, frames: Array) -> Array:
        _, _, h, w = frames.shape
        if h % 4 or w % 4:
            raise ConfigurationError(f"Frame size {h}x{w} must be divisible by 4")
        x = frames
        for layer in self.layers:
            x = ops.leaky_relu(layer(x))
        return x


class Decoder(Module):
    """upsample + conv3x3 (4C->2C) + lrelu, upsample + conv3x3 (2C->C) + lrelu, conv3x3 head + sigmoid."""

    def __init__(self, spec: DecoderSpec, rng: SplitMix64):
        super().__init__()
        self.spec = spec
        c = spec.base_channels
        self.up1 = Conv2d(4 * c, 2 * c, 3, rng, padding=1, pad_mode="edge")
        self.up2 = Conv2d(2 * c, c, 3, rng, padding=1, pad_mode="edge")
        self.head = Conv2d(c, spec.out_channels, 3, rng, padding=1, pad_mode="edge")

    def forward(self, features: Array) -> Array:
        if features.ndim != 4 or features.shape[1] != self.spec.in_channels:
            raise ContractError(
                f"Decoder expects N x {self.spec.in_channels} x h x w features, got {features.shape}"
            )
        x = ops.leaky_relu(self.up1(ops.upsample_nearest(features, 2)))
        x = ops.leaky_relu(self.up2(ops.upsample_nearest(x, 2)))
        return ops.sigmoid(self.head(x))


def encode_frames(x_masked: Array, encoder: Encoder) -> Array:
    """Embed a masked clip into latent features.

    Args:
        x_masked: T x H x W x C (or B x T x H x W x C) clip, already multiplied by the mask
        encoder: Encoder module

    Returns:
        (B*T) x 4C x H/4 x W/4 feature map
    """
    frames, _, _ = clip_to_frames(x_masked)
    if frames.shape[1] != encoder.spec.in_channels:
        raise ContractError(f"Encoder expects {encoder.spec.in_channels} channels, got {frames.shape[1]}")
    return encoder(frames)


def decode_frames(f_fused: Array, decoder: Decoder, batch: int = 1, squeeze: bool = True) -> Array:
    """Reconstruct a channels-last clip in [0, 1] from fused features.

    ``f_fused`` is (B*T) x 4C x h x w; the result is T x 4h x 4w x out
    (or B x T x ... when ``squeeze`` is false or ``batch`` > 1).
    """
    n = f_fused.shape[0]
    if n % batch:
        raise ContractError(f"{n} frames do not split into {batch} clips")
    out = decoder(f_fused)
    return frames_to_clip(out, batch, n // batch, squeeze and batch == 1)
