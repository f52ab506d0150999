"""Tests for synthetic clips, masks, crop metrics and file formats."""

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from data import (
    MaskSpec,
    SyntheticScene,
    build_dataset,
    corrupted_fraction,
    crop_metrics,
    decode_clip,
    depth_rmse,
    encode_clip,
    generate_clip,
    generate_masks,
    load_dataset,
    mse_crop,
    psnr_crop,
    psnr_from_mse,
    radial_depth,
    read_clip,
    read_frames_ppm,
    read_mask_pgm,
    save_dataset,
    ssim_crop,
    ssim_map,
    write_clip,
    write_frames_ppm,
    write_mask_pgm,
)
from utils.errors import ConfigurationError, ContractError, DataError, FormatError


def _center_mask(t=1, h=16, w=16):
    mask = np.ones((t, h, w, 1))
    mask[:, h // 4: 3 * h // 4, w // 4: 3 * w // 4] = 0.0
    return mask


class TestSyntheticClips:
    """Seeded endoscopy-like scenes."""

    def test_deterministic(self):
        scene = SyntheticScene(seed=42)
        a = generate_clip(scene, 4, 16, 16)
        b = generate_clip(scene, 4, 16, 16)
        assert_array_equal(a[0], b[0])
        assert_array_equal(a[1], b[1])

    def test_shapes_and_range(self):
        clip, depth = generate_clip(SyntheticScene(seed=1), 3, 16, 24)
        assert clip.shape == (3, 16, 24, 3) and depth.shape == (3, 16, 24, 1)
        assert clip.dtype == np.float32
        assert clip.min() >= 0.0 and clip.max() <= 1.0
        assert depth.min() >= 0.0 and depth.max() <= 1.0

    def test_static_scene_repeats_frames(self):
        scene = SyntheticScene(seed=3, camera_drift=0.0, polyp_speed=0.0, texture_speed=0.0)
        clip, depth = generate_clip(scene, 4, 16, 16)
        for t in range(1, 4):
            assert_array_equal(clip[t], clip[0])
            assert_array_equal(depth[t], depth[0])

    def test_tube_centre_nearer_than_corner(self):
        centre = radial_depth(np.array(0.0), np.array(0.0))
        corner = radial_depth(np.array(1.0), np.array(1.0))
        assert centre < corner

    def test_different_seeds_differ(self):
        a, _ = generate_clip(SyntheticScene(seed=1), 1, 16, 16)
        b, _ = generate_clip(SyntheticScene(seed=2), 1, 16, 16)
        assert not np.array_equal(a, b)

    @pytest.mark.parametrize("frames,h,w", [(0, 16, 16), (2, 15, 16), (2, 16, 2)])
    def test_invalid_extents(self, frames, h, w):
        with pytest.raises(ConfigurationError):
            generate_clip(SyntheticScene(), frames, h, w)


class TestMasks:
    """Corruption masks."""

    def test_zero_fraction_is_all_valid(self):
        assert_array_equal(generate_masks(MaskSpec(fraction=0.0), 3, 8, 8), 1.0)

    def test_fraction_at_desk_scale(self):
        masks = generate_masks(MaskSpec(seed=5, fraction=0.08), 5, 64, 64)
        assert 0.05 <= corrupted_fraction(masks) <= 0.11

    def test_exact_count_per_frame(self):
        masks = generate_masks(MaskSpec(seed=5, fraction=0.1), 4, 32, 32)
        zeros = (masks == 0).reshape(4, -1).sum(axis=1)
        assert_array_equal(zeros, round(0.1 * 32 * 32))

    def test_deterministic(self):
        spec = MaskSpec(seed=9)
        assert_array_equal(generate_masks(spec, 3, 16, 16), generate_masks(spec, 3, 16, 16))

    def test_binary(self):
        masks = generate_masks(MaskSpec(seed=9), 3, 16, 16)
        assert masks.shape == (3, 16, 16, 1)
        assert set(np.unique(masks).tolist()) <= {0.0, 1.0}

    @pytest.mark.parametrize("fraction", [-0.1, 0.5, 0.9])
    def test_fraction_out_of_range(self, fraction):
        with pytest.raises(ConfigurationError):
            MaskSpec(fraction=fraction)


class TestCropMetrics:
    """Metrics restricted to corrupted pixels."""

    def test_identical_clips(self, rng):
        truth = rng.uniform((2, 16, 16, 3))
        record = crop_metrics(truth, truth, _center_mask(t=2))
        assert record["mse_crop"] == 0.0
        assert record["psnr_crop"] == 99.0
        assert record["ssim_crop"] == pytest.approx(1.0)

    def test_single_pixel_off_by_one_level(self):
        truth = np.zeros((1, 4, 4, 3))
        pred = truth.copy()
        pred[0, 1, 2] = 1.0 / 255.0
        mask = np.ones((1, 4, 4, 1))
        mask[0, 1, 2] = 0.0
        assert mse_crop(pred, truth, mask) == pytest.approx(1.0)

    def test_valid_pixels_are_ignored(self, rng):
        truth = rng.uniform((1, 16, 16, 3))
        pred = truth.copy()
        mask = _center_mask()
        pred[mask[..., 0] == 1] = 0.0
        assert mse_crop(pred, truth, mask) == 0.0

    def test_matches_scalar_loop(self, rng):
        truth, pred = rng.uniform((2, 8, 8, 3)), rng.uniform((2, 8, 8, 3))
        mask = (rng.uniform((2, 8, 8, 1)) > 0.4).astype(np.float64)
        total, count = 0.0, 0
        for t in range(2):
            for i in range(8):
                for j in range(8):
                    if mask[t, i, j, 0] == 0:
                        for c in range(3):
                            total += (255.0 * (pred[t, i, j, c] - truth[t, i, j, c])) ** 2
                            count += 1
        assert mse_crop(pred, truth, mask) == pytest.approx(total / count, rel=1e-5)

    def test_psnr_closed_form(self):
        assert psnr_from_mse(650.25) == pytest.approx(20.0)

    def test_psnr_cap_only_for_zero_error(self):
        assert psnr_from_mse(0.0) == 99.0
        tiny = 255.0 ** 2 * 10.0 ** -10.5
        assert psnr_from_mse(tiny) == pytest.approx(105.0)
        assert psnr_from_mse(1e-12) > 99.0

    def test_psnr_negative_mse(self):
        with pytest.raises(ContractError):
            psnr_from_mse(-1.0)

    def test_psnr_recomputed_from_mse(self, rng):
        truth, pred = rng.uniform((1, 8, 8, 3)), rng.uniform((1, 8, 8, 3))
        mask = _center_mask(1, 8, 8)
        expected = 10.0 * np.log10(255.0 ** 2 / mse_crop(pred, truth, mask))
        assert psnr_crop(pred, truth, mask) == pytest.approx(expected, abs=1e-6)

    def test_ssim_constant_clips_below_one(self):
        mask = _center_mask()
        assert ssim_crop(np.full((1, 16, 16, 3), 0.2), np.full((1, 16, 16, 3), 0.6), mask) < 1.0

    def test_ssim_matches_direct_windows(self, rng):
        pred, truth = rng.uniform((1, 16, 16, 3)), rng.uniform((1, 16, 16, 3))
        taps = np.exp(-np.arange(-5, 6) ** 2 / (2 * 1.5 ** 2))
        window = np.outer(taps, taps) / taps.sum() ** 2
        c1, c2 = (0.01 * 255) ** 2, (0.03 * 255) ** 2
        expected = np.zeros((1, 16, 16, 3))
        for ch in range(3):
            x = np.pad(pred[0, ..., ch] * 255, 5, mode="symmetric")
            y = np.pad(truth[0, ..., ch] * 255, 5, mode="symmetric")
            for i in range(16):
                for j in range(16):
                    px, py = x[i:i + 11, j:j + 11], y[i:i + 11, j:j + 11]
                    mx, my = (window * px).sum(), (window * py).sum()
                    vx = (window * px * px).sum() - mx ** 2
                    vy = (window * py * py).sum() - my ** 2
                    cov = (window * px * py).sum() - mx * my
                    expected[0, i, j, ch] = ((2 * mx * my + c1) * (2 * cov + c2)
                                             / ((mx ** 2 + my ** 2 + c1) * (vx + vy + c2)))
        assert_allclose(ssim_map(pred, truth), expected, atol=1e-5)

    def test_no_corrupted_pixels(self, rng):
        truth = rng.uniform((1, 4, 4, 3))
        with pytest.raises(ContractError):
            mse_crop(truth, truth, np.ones((1, 4, 4, 1)))

    def test_shape_mismatch(self, rng):
        with pytest.raises(ContractError):
            mse_crop(rng.uniform((1, 4, 4, 3)), rng.uniform((1, 4, 8, 3)), np.zeros((1, 4, 4, 1)))

    def test_depth_rmse(self):
        pred, truth = np.full((1, 4, 4, 1), 0.5), np.full((1, 4, 4, 1), 0.2)
        assert depth_rmse(pred, truth) == pytest.approx(0.3)
        mask = np.ones((1, 4, 4, 1))
        mask[0, 0, 0] = 0.0
        pred[0, 1, 1] = 0.9
        assert depth_rmse(pred, truth, mask) == pytest.approx(0.3)


class TestClipContainer:
    """DVT1 containers."""

    def test_round_trip(self, tmp_path, rng):
        clip = rng.uniform((3, 8, 12, 3)).astype(np.float32)
        read = read_clip(write_clip(tmp_path / "clip.dvt", clip))
        assert read.dtype == np.float32
        assert_array_equal(read, clip)

    def test_payload_length(self):
        payload = encode_clip(np.zeros((5, 64, 64, 3), dtype=np.float32))
        assert payload[:4] == b"DVT1"
        assert len(payload) == 20 + 5 * 64 * 64 * 3 * 4

    @pytest.mark.parametrize("index", [0, 2])
    def test_bad_magic_names_offset(self, index):
        payload = bytearray(encode_clip(np.zeros((1, 4, 4, 1), dtype=np.float32)))
        payload[index] ^= 0xFF
        with pytest.raises(FormatError) as info:
            decode_clip(bytes(payload))
        assert info.value.offset == index
        assert f"offset {index}" in str(info.value)

    def test_truncated_payload(self):
        payload = encode_clip(np.zeros((1, 4, 4, 1), dtype=np.float32))
        with pytest.raises(FormatError) as info:
            decode_clip(payload[:-4])
        assert info.value.offset == len(payload) - 4

    def test_truncated_header(self):
        with pytest.raises(FormatError) as info:
            decode_clip(b"DVT1\x01\x00")
        assert info.value.offset == 6

    def test_trailing_bytes(self):
        payload = encode_clip(np.zeros((1, 4, 4, 1), dtype=np.float32))
        with pytest.raises(FormatError) as info:
            decode_clip(payload + b"\x00")
        assert info.value.offset == len(payload)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError):
            read_clip(tmp_path / "missing.dvt")

    def test_read_clip_keeps_offset(self, tmp_path):
        path = tmp_path / "bad.dvt"
        path.write_bytes(b"XVT1" + bytes(16))
        with pytest.raises(FormatError) as info:
            read_clip(path)
        assert info.value.offset == 0
        assert "bad.dvt" in str(info.value)


class TestImageDirectories:
    """PPM frames and PGM masks."""

    def test_frames_quantize_to_eight_bits(self, tmp_path, rng):
        clip = rng.uniform((2, 8, 8, 3))
        write_frames_ppm(tmp_path, clip)
        read = read_frames_ppm(tmp_path)
        assert read.shape == clip.shape
        assert np.max(np.abs(read - clip)) <= 0.5 / 255 + 1e-6

    def test_masks_round_trip(self, tmp_path):
        masks = generate_masks(MaskSpec(seed=2, fraction=0.2), 2, 8, 8)
        write_mask_pgm(tmp_path, masks)
        assert_array_equal(read_mask_pgm(tmp_path), masks)

    def test_empty_directory(self, tmp_path):
        with pytest.raises(DataError):
            read_frames_ppm(tmp_path)

    def test_wrong_channel_count(self, tmp_path):
        with pytest.raises(DataError):
            write_frames_ppm(tmp_path, np.zeros((1, 4, 4, 1)))


class TestDataset:
    """Synthetic dataset on disk."""

    def test_build_names_and_shapes(self, tiny_config):
        samples = build_dataset(tiny_config)
        assert [s.name for s in samples] == ["clip_000"]
        assert samples[0].frames.shape == (8, 16, 16, 3)
        assert samples[0].masks.shape == (8, 16, 16, 1)

    def test_build_is_deterministic(self, tiny_config):
        a, b = build_dataset(tiny_config), build_dataset(tiny_config)
        assert_array_equal(a[0].frames, b[0].frames)
        assert_array_equal(a[0].masks, b[0].masks)

    def test_save_and_load(self, tmp_path, tiny_config):
        samples = build_dataset(tiny_config)
        written = save_dataset(tmp_path, samples, ppm=True)
        assert len(written) == 3
        assert (tmp_path / "clip_000" / "frame_0000.ppm").is_file()
        loaded = load_dataset(tmp_path)
        assert [s.name for s in loaded] == ["clip_000"]
        assert_array_equal(loaded[0].depth, samples[0].depth)

    def test_missing_directory(self, tmp_path):
        with pytest.raises(DataError):
            load_dataset(tmp_path / "nowhere")

    def test_empty_directory(self, tmp_path):
        with pytest.raises(DataError):
            load_dataset(tmp_path)
