"""Tests for depth embedding and paired channel fusion."""

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from model import BMPCF, encode_depth, fuse_pairs, interleave_channels
from model.codec import Encoder, EncoderSpec
from numerics import Array, Conv2d, SplitMix64, conv2d
from utils.errors import ConfigurationError, ContractError


def _pair_conv(c, first, second):
    conv = Conv2d(2 * c, c, 1, SplitMix64(0), groups=c)
    conv.weight.data[:, 0, 0, 0] = first
    conv.weight.data[:, 1, 0, 0] = second
    return conv


class TestEncodeDepth:
    """Enc_D."""

    def test_shape_matches_visual_features(self, rng):
        enc = Encoder(EncoderSpec(8, in_channels=1), SplitMix64(0))
        assert encode_depth(Array(rng.uniform((2, 64, 64, 1))), enc).shape == (2, 32, 16, 16)

    def test_constant_depth_gives_constant_features(self, float64):
        enc = Encoder(EncoderSpec(2, in_channels=1), SplitMix64(0))
        out = encode_depth(Array(np.full((1, 16, 16, 1), 0.6)), enc).data
        assert_allclose(out, np.broadcast_to(out[:, :, :1, :1], out.shape), atol=1e-12)

    def test_needs_one_channel(self, rng):
        enc = Encoder(EncoderSpec(2, in_channels=1), SplitMix64(0))
        with pytest.raises(ContractError):
            encode_depth(Array(rng.uniform((1, 16, 16, 3))), enc)


class TestInterleave:
    """[v0, d0, v1, d1, ...] ordering."""

    def test_two_channels(self, float64):
        v = Array(np.array([1.0, 2.0]).reshape(1, 2, 1, 1))
        d = Array(np.array([10.0, 20.0]).reshape(1, 2, 1, 1))
        assert_array_equal(interleave_channels(v, d).data.ravel(), [1.0, 10.0, 2.0, 20.0])

    def test_one_channel(self, float64):
        out = interleave_channels(Array(np.full((1, 1, 1, 1), 3.0)), Array(np.full((1, 1, 1, 1), 4.0)))
        assert_array_equal(out.data.ravel(), [3.0, 4.0])

    def test_shape_mismatch(self, rng):
        with pytest.raises(ContractError):
            interleave_channels(Array(rng.normal((1, 2, 2, 2))), Array(rng.normal((1, 3, 2, 2))))

    def test_even_and_odd_slices_give_back_the_inputs(self, float64, rng):
        v, d = Array(rng.normal((2, 5, 3, 4))), Array(rng.normal((2, 5, 3, 4)))
        paired = interleave_channels(v, d).data
        assert paired.shape == (2, 10, 3, 4)
        assert_array_equal(paired[:, 0::2], v.data)
        assert_array_equal(paired[:, 1::2], d.data)


class TestFusePairs:
    """Group-wise fusion of each (visual, depth) pair."""

    def test_selects_visual(self, float64, rng):
        v, d = Array(rng.normal((2, 4, 3, 3))), Array(rng.normal((2, 4, 3, 3)))
        out = fuse_pairs(interleave_channels(v, d), _pair_conv(4, 1.0, 0.0))
        assert_array_equal(out.data, v.data)

    def test_averages_pairs(self, float64, rng):
        v, d = Array(rng.normal((2, 4, 3, 3))), Array(rng.normal((2, 4, 3, 3)))
        out = fuse_pairs(interleave_channels(v, d), _pair_conv(4, 0.5, 0.5))
        assert_allclose(out.data, (v.data + d.data) / 2)

    @pytest.mark.parametrize("source", ["visual", "depth"])
    @pytest.mark.parametrize("channel", [0, 2, 3])
    def test_perturbing_one_pair_changes_only_its_output(self, float64, rng, source, channel):
        conv = Conv2d(8, 4, 3, SplitMix64(5), padding=1, groups=4)
        v, d = rng.normal((2, 4, 5, 5)), rng.normal((2, 4, 5, 5))
        base = fuse_pairs(interleave_channels(Array(v), Array(d)), conv).data
        bumped_v, bumped_d = v.copy(), d.copy()
        target = bumped_v if source == "visual" else bumped_d
        target[:, channel] += rng.normal((2, 5, 5))
        out = fuse_pairs(interleave_channels(Array(bumped_v), Array(bumped_d)), conv).data
        changed = np.abs(out - base).max(axis=(0, 2, 3)) > 1e-12
        assert changed.tolist() == [c == channel for c in range(4)]

    def test_zero_depth_reduces_to_depthwise_visual_conv(self, float64, rng):
        conv = Conv2d(8, 4, 3, SplitMix64(6), padding=1, groups=4)
        conv.bias.data[:] = rng.normal(4)
        v = Array(rng.normal((2, 4, 5, 5)))
        zeros = Array(np.zeros((2, 4, 5, 5)))
        out = fuse_pairs(interleave_channels(v, zeros), conv)
        visual_only = conv2d(v, Array(conv.weight.data[:, :1]), conv.bias, padding=1, groups=4)
        assert_allclose(out.data, visual_only.data, atol=1e-12)

    def test_odd_channel_count(self, rng):
        with pytest.raises(ContractError):
            fuse_pairs(Array(rng.normal((1, 3, 2, 2))), _pair_conv(1, 1.0, 0.0))

    def test_dense_conv_rejected(self, rng):
        dense = Conv2d(4, 2, 1, SplitMix64(0))
        with pytest.raises(ContractError):
            fuse_pairs(Array(rng.normal((1, 4, 2, 2))), dense)


class TestBMPCF:
    """Fusion module."""

    @pytest.mark.parametrize("mode", ["paired", "concat"])
    def test_forward_shape(self, rng, mode):
        fusion = BMPCF(2, SplitMix64(1), mode=mode)
        out = fusion(Array(rng.normal((3, 8, 4, 4))), Array(rng.uniform((3, 16, 16, 1))))
        assert out.shape == (3, 8, 4, 4)

    def test_paired_conv_is_grouped(self):
        assert BMPCF(2, SplitMix64(1)).fusion.groups == 8

    def test_depth_must_match_visual(self, rng):
        fusion = BMPCF(2, SplitMix64(1))
        with pytest.raises(ContractError):
            fusion(Array(rng.normal((3, 8, 4, 4))), Array(rng.uniform((3, 8, 8, 1))))

    @pytest.mark.parametrize("kwargs", [{"mode": "sum"}, {"kernel_size": 5}])
    def test_bad_configuration(self, kwargs):
        with pytest.raises(ConfigurationError):
            BMPCF(2, SplitMix64(1), **kwargs)
