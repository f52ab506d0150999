"""Shared fixtures."""

import copy

import pytest

from numerics import SplitMix64, precision
from training import RunConfig

TINY = {
    "model": {"base_channels": 2, "num_blocks": 2, "ffn_expansion": 2},
    "discriminator": {"channels": [4, 4]},
    "training": {"seed": 0, "iterations": 2, "batch_size": 1, "frames": 5, "log_every": 0},
    "data": {"num_clips": 1, "clip_frames": 8, "height": 16, "width": 16},
    "inference": {"window": 5, "references": 2, "radius": 5},
}


@pytest.fixture
def float64():
    """Run the test body in 64-bit precision."""
    with precision("float64"):
        yield


@pytest.fixture
def rng():
    return SplitMix64(1234)


@pytest.fixture
def tiny_mapping():
    """Settings of a model small enough to train a few steps in a unit test."""
    return copy.deepcopy(TINY)


@pytest.fixture
def tiny_config(tiny_mapping):
    return RunConfig.from_mapping(tiny_mapping)
