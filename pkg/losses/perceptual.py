"""Perceptual and style terms computed on a frozen, seed-generated feature pyramid.

The bank stands in for a pretrained perceptual network: three conv3x3 +
relu levels at strides 1, 2 and 4, weights drawn from ``BANK_SEED`` and
never trained. Same seed, same weights, bit for bit.
"""

from __future__ import annotations

import logging

from model.codec import clip_to_frames
from numerics import Array, Conv2d, Module, SplitMix64, as_array, freeze, ops
from utils.errors import ContractError

logger = logging.getLogger(__name__)

BANK_SEED = 0x5EED_BA4C
BANK_CHANNELS = (8, 16, 32)


class FixedFeatureBank(Module):
    """Three-level frozen feature extractor.

    Args:
        seed: Stream seed for the weights
        in_channels: Channels of the clips it is applied to
        channels: Output channels per level
    """

    def __init__(self, seed: int = BANK_SEED, in_channels: int = 3, channels=BANK_CHANNELS):
        super().__init__()
        rng = SplitMix64.derive(seed, 0)
        self.seed = seed
        levels = []
        previous = in_channels
        for i, out in enumerate(channels):
            stride = 1 if i == 0 else 2
            levels.append(Conv2d(previous, out, 3, rng, stride=stride, padding=1, pad_mode="edge"))
            previous = out
        self.levels = levels
        freeze(self)

    def features(self, clip) -> list[Array]:
        frames, _, _ = clip_to_frames(as_array(clip))
        out = []
        x = frames
        for level in self.levels:
            x = ops.relu(level(x))
            out.append(x)
        return out


def gram_matrix(features: Array) -> Array:
    """N x C x H x W -> N x C x C, G = F F^T / (C H W)."""
    n, c, h, w = features.shape
    f = features.reshape(n, c, h * w)
    return ops.matmul(f, f.transpose(0, 2, 1)) / float(c * h * w)


def _check_shapes(pred: Array, target: Array) -> None:
    if pred.shape != target.shape:
        raise ContractError(f"Clip shapes differ: {pred.shape} vs {target.shape}")


def perceptual_loss(pred, target, bank: FixedFeatureBank) -> Array:
    """Mean over levels of the mean |phi(pred) - phi(target)|."""
    pred, target = as_array(pred), as_array(target)
    _check_shapes(pred, target)
    terms = [ops.abs_(fp - ft).mean() for fp, ft in zip(bank.features(pred), bank.features(target))]
    return sum(terms[1:], terms[0]) / float(len(terms))


def style_loss(pred, target, bank: FixedFeatureBank) -> Array:
    """Mean over levels of the mean |G(phi(pred)) - G(phi(target))|."""
    pred, target = as_array(pred), as_array(target)
    _check_shapes(pred, target)
    terms = [
        ops.abs_(gram_matrix(fp) - gram_matrix(ft)).mean()
        for fp, ft in zip(bank.features(pred), bank.features(target))
    ]
    return sum(terms[1:], terms[0]) / float(len(terms))
