"""Inpainting network components."""

from model.bmpcf import BMPCF, encode_depth, fuse_pairs, interleave_channels
from model.codec import Decoder, DecoderSpec, Encoder, EncoderSpec, decode_frames, encode_frames
from model.ded import Discriminator, discriminate, loss_ded, loss_gen, make_rgbd
from model.generator import Generator, apply_mask, composite
from model.stgde import (
    STGDE,
    BlockParams,
    PatchGrid,
    attention_weights,
    block_forward,
    compute_attention,
    depth_block_indices,
    estimate_depth,
    patchify,
    project_qkv,
    token_mask_from_pixels,
    unpatchify,
)

__all__ = [
    "BMPCF",
    "encode_depth",
    "fuse_pairs",
    "interleave_channels",
    "Decoder",
    "DecoderSpec",
    "Encoder",
    "EncoderSpec",
    "decode_frames",
    "encode_frames",
    "Discriminator",
    "discriminate",
    "loss_ded",
    "loss_gen",
    "make_rgbd",
    "Generator",
    "apply_mask",
    "composite",
    "STGDE",
    "BlockParams",
    "PatchGrid",
    "attention_weights",
    "block_forward",
    "compute_attention",
    "depth_block_indices",
    "estimate_depth",
    "patchify",
    "project_qkv",
    "token_mask_from_pixels",
    "unpatchify",
]
