"""Tests for the assembled inpainting network."""

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from model import Generator, apply_mask, composite
from numerics import Array, SplitMix64
from utils.errors import ContractError


@pytest.fixture
def generator():
    return Generator(SplitMix64(9), base_channels=2, num_blocks=2, ffn_expansion=2)


@pytest.fixture
def clip(rng):
    frames = rng.uniform((3, 16, 16, 3))
    masks = np.ones((3, 16, 16, 1))
    masks[:, 4:9, 5:11] = 0.0
    return frames, masks


class TestGenerator:
    """Forward contract."""

    def test_output_shapes_and_ranges(self, generator, clip):
        frames, masks = clip
        frames_hat, depth = generator(Array(frames), masks)
        assert frames_hat.shape == (3, 16, 16, 3)
        assert depth.shape == (3, 16, 16, 1)
        for out in (frames_hat, depth):
            assert out.data.min() >= 0.0 and out.data.max() <= 1.0

    def test_batched_forward(self, generator, rng):
        frames = Array(rng.uniform((2, 3, 16, 16, 3)))
        frames_hat, depth = generator(frames, np.ones((2, 3, 16, 16, 1)))
        assert frames_hat.shape == (2, 3, 16, 16, 3)
        assert depth.shape == (2, 3, 16, 16, 1)

    def test_corrupted_pixels_do_not_leak(self, generator, clip):
        frames, masks = clip
        tampered = frames.copy()
        tampered[masks[..., 0] == 0] = 0.123
        a, _ = generator(Array(frames), masks)
        b, _ = generator(Array(tampered), masks)
        assert_array_equal(a.data, b.data)

    def test_deterministic_initialization(self, clip):
        frames, masks = clip
        g1 = Generator(SplitMix64(9), base_channels=2, num_blocks=2, ffn_expansion=2)
        g2 = Generator(SplitMix64(9), base_channels=2, num_blocks=2, ffn_expansion=2)
        assert_array_equal(g1(Array(frames), masks)[0].data, g2(Array(frames), masks)[0].data)


class TestMasking:
    """Input masking and output compositing."""

    def test_apply_mask_zeroes_corrupted(self, clip):
        frames, masks = clip
        out = apply_mask(Array(frames), masks).data
        assert np.all(out[masks[..., 0] == 0] == 0.0)

    def test_apply_mask_shape(self, clip):
        frames, _ = clip
        with pytest.raises(ContractError):
            apply_mask(Array(frames), np.ones((3, 16, 16, 3)))

    def test_composite_keeps_valid_pixels(self, clip, rng):
        frames, masks = clip
        out = composite(frames, masks, rng.uniform(frames.shape))
        valid = masks[..., 0] == 1
        assert_array_equal(out[valid], frames[valid])
        assert not np.array_equal(out[~valid], frames[~valid])
