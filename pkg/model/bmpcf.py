"""Bi-modal paired channel fusion.

The estimated depth is embedded to the same channel count as the visual
features, the two are interleaved channel by channel (visual at even
indices, depth at odd ones) and a group-wise convolution with one group
per (visual, depth) pair mixes each pair into one output channel.
"""

from __future__ import annotations

import logging

from model.codec import Encoder, EncoderSpec, clip_to_frames
from numerics import Array, Conv2d, Module, SplitMix64, ops
from utils.errors import ConfigurationError, ContractError

logger = logging.getLogger(__name__)

FUSION_MODES = ("paired", "concat")


def encode_depth(d_hat: Array, depth_encoder: Encoder) -> Array:
    """Enc_D: T x H x W x 1 (or batched) depth -> (B*T) x c x H/4 x W/4 features."""
    if d_hat.shape[-1] != 1:
        raise ContractError(f"Depth maps need a single channel, got shape {d_hat.shape}")
    frames, _, _ = clip_to_frames(d_hat)
    return depth_encoder(frames)


def interleave_channels(visual: Array, depth: Array) -> Array:
    """[v0, v1, ...] and [d0, d1, ...] -> [v0, d0, v1, d1, ...].

    Raises:
        ContractError: If the two feature maps differ in shape
    """
    if visual.shape != depth.shape:
        raise ContractError(f"Visual {visual.shape} and depth {depth.shape} features must match")
    n, c, h, w = visual.shape
    stacked = ops.concat([visual.reshape(n, c, 1, h, w), depth.reshape(n, c, 1, h, w)], axis=2)
    return stacked.reshape(n, 2 * c, h, w)


def fuse_pairs(paired: Array, group_conv: Conv2d) -> Array:
    """Group-wise convolution with c groups of two input channels each.

    Output channel i only sees paired channels 2i and 2i+1.
    """
    channels = paired.shape[1]
    if channels % 2:
        raise ContractError(f"Paired features need an even channel count, got {channels}")
    if group_conv.groups != channels // 2 or group_conv.weight.shape[1] != 2:
        raise ContractError(
            f"Fusion conv must have {channels // 2} groups of 2 channels, "
            f"got groups={group_conv.groups}, weight {group_conv.weight.shape}"
        )
    return group_conv(paired)


class BMPCF(Module):
    """Depth encoder plus the fusion convolution.

    ``mode="concat"`` replaces pairing by plain concatenation followed by a
    dense convolution, the configuration without paired fusion.
    """

    def __init__(self, base_channels: int, rng: SplitMix64, kernel_size: int = 3, mode: str = "paired"):
        super().__init__()
        if mode not in FUSION_MODES:
            raise ConfigurationError(f"Unknown fusion mode '{mode}', expected one of {FUSION_MODES}")
        if kernel_size not in (1, 3):
            raise ConfigurationError(f"Fusion kernel must be 1 or 3, got {kernel_size}")
        self.mode = mode
        spec = EncoderSpec(base_channels, in_channels=1)
        c = spec.out_channels
        self.depth_encoder = Encoder(spec, rng)
        padding = kernel_size // 2
        if mode == "paired":
            self.fusion = Conv2d(2 * c, c, kernel_size, rng, padding=padding, groups=c)
        else:
            self.fusion = Conv2d(2 * c, c, kernel_size, rng, padding=padding)

    def forward(self, visual: Array, d_hat: Array) -> Array:
        f_d = encode_depth(d_hat, self.depth_encoder)
        if f_d.shape != visual.shape:
            raise ContractError(f"Depth features {f_d.shape} do not match visual features {visual.shape}")
        if self.mode == "paired":
            return fuse_pairs(interleave_channels(visual, f_d), self.fusion)
        return self.fusion(ops.concat([visual, f_d], axis=1))
