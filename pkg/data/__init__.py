"""Synthetic data, corruption masks, file formats and crop metrics."""

from data.dataset import ClipSample, build_dataset, load_dataset, save_dataset
from data.io import (
    decode_clip,
    encode_clip,
    read_clip,
    read_frames_ppm,
    read_mask_pgm,
    write_clip,
    write_frames_ppm,
    write_mask_pgm,
)
from data.masks import MaskSpec, corrupted_fraction, generate_masks
from data.metrics import crop_metrics, depth_rmse, mse_crop, psnr_crop, psnr_from_mse, ssim_crop, ssim_map
from data.synthetic import SyntheticScene, generate_clip, radial_depth

__all__ = [
    "ClipSample",
    "build_dataset",
    "load_dataset",
    "save_dataset",
    "decode_clip",
    "encode_clip",
    "read_clip",
    "read_frames_ppm",
    "read_mask_pgm",
    "write_clip",
    "write_frames_ppm",
    "write_mask_pgm",
    "MaskSpec",
    "corrupted_fraction",
    "generate_masks",
    "crop_metrics",
    "depth_rmse",
    "mse_crop",
    "psnr_crop",
    "psnr_from_mse",
    "ssim_crop",
    "ssim_map",
    "SyntheticScene",
    "generate_clip",
    "radial_depth",
]
