"""Depth-enhanced discriminator and its hinge objectives.

Six spectral-normalized 3-D convolution blocks score a channels-last
RGB-D clip; the last feature map is reduced by a 1x1x1 head and averaged
to one unbounded score per clip.
"""

from __future__ import annotations

import logging
from typing import Sequence

from numerics import Array, Conv3d, Module, SpectralNormConv3d, SplitMix64, as_array, ops
from utils.errors import ConfigurationError, ContractError

logger = logging.getLogger(__name__)

DEFAULT_CHANNELS = (16, 32, 64, 64, 64, 64)
HINGE_VARIANTS = ("printed", "standard")
INPUT_MODES = ("rgbd", "rgb")


def make_rgbd(frames: Array, depth: Array) -> Array:
    """Concatenate a clip and its depth along the channel axis (RGB first)."""
    if frames.shape[:-1] != depth.shape[:-1]:
        raise ContractError(f"Clip {frames.shape} and depth {depth.shape} differ in T, H or W")
    if frames.shape[-1] != 3 or depth.shape[-1] != 1:
        raise ContractError(f"Expected 3 colour channels and 1 depth channel, got {frames.shape[-1]} and {depth.shape[-1]}")
    return ops.concat([frames, depth], axis=-1)


class Discriminator(Module):
    """Spatio-temporal critic.

    Args:
        rng: Initialization stream
        in_channels: 4 for RGB-D input, 3 for the RGB-only critic
        channels: Output channels of the six blocks
        power_iterations: Spectral-norm updates per training forward
    """

    def __init__(self, rng: SplitMix64, in_channels: int = 4, channels: Sequence[int] = DEFAULT_CHANNELS,
                 power_iterations: int = 1):
        super().__init__()
        if len(channels) < 1:
            raise ConfigurationError("Discriminator needs at least one block")
        self.in_channels = in_channels
        blocks = []
        previous = in_channels
        for i, out in enumerate(channels):
            stride = (1, 1, 1) if i == 0 else (1, 2, 2)
            blocks.append(SpectralNormConv3d(previous, out, 3, rng, stride=stride, padding=1,
                                             power_iterations=power_iterations))
            previous = out
        self.blocks = blocks
        self.head = Conv3d(previous, 1, 1, rng)

    def forward(self, clip: Array) -> Array:
        return discriminate(clip, self)


def discriminate(x: Array, params: Discriminator) -> Array:
    """Score a T x H x W x C clip (or B x T x H x W x C batch).

    Returns:
        Array of shape (B,) holding one unbounded score per clip

    Raises:
        ContractError: If the channel count does not match the critic
    """
    if x.ndim == 4:
        x = x.reshape((1,) + x.shape)
    if x.ndim != 5:
        raise ContractError(f"Expected a T x H x W x C clip, got shape {x.shape}")
    if x.shape[-1] != params.in_channels:
        raise ContractError(f"Discriminator expects {params.in_channels} channels, got {x.shape[-1]}")
    h = x.transpose(0, 4, 1, 2, 3)
    for block in params.blocks:
        h = ops.leaky_relu(block(h))
    scores = params.head(h)
    return scores.mean(axis=(1, 2, 3, 4))


def loss_ded(score_real: Array, score_fake: Array, hinge: str = "printed") -> Array:
    """Critic objective.

    ``"printed"``: mean relu(1 - real) + mean relu(fake).
    ``"standard"``: mean relu(1 - real) + mean relu(1 + fake).
    """
    if hinge not in HINGE_VARIANTS:
        raise ConfigurationError(f"Unknown hinge variant '{hinge}', expected one of {HINGE_VARIANTS}")
    score_real, score_fake = as_array(score_real), as_array(score_fake)
    real_term = ops.relu(1.0 - score_real).mean()
    fake_term = ops.relu(score_fake) if hinge == "printed" else ops.relu(1.0 + score_fake)
    return real_term + fake_term.mean()


def loss_gen(score_fake: Array) -> Array:
    """Generator adversarial term: -mean(score_fake)."""
    return -as_array(score_fake).mean()
