"""Spatial-temporal transformer blocks and the depth head fed by all of them.

Each block projects its input to Q, K and V (V additionally enhanced by a
3x3 depth-wise convolution), cuts every frame into r1 x r2 patches, lets
every patch of every frame of a clip attend to every other patch of that
clip, and returns both the block output and the raw attention output.
The depth head sums 1x1 projections of the attention outputs of the
selected blocks and decodes them to a one-channel depth map.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from model.codec import Decoder, DecoderSpec, frames_to_clip
from numerics import Array, Conv2d, Module, SplitMix64, ops
from utils.errors import ConfigurationError, ContractError

logger = logging.getLogger(__name__)

MASK_RULES = ("additive", "multiplicative")


@dataclass(frozen=True)
class PatchGrid:
    """r1 x r2 patches per frame."""

    rows: int = 2
    cols: int = 2

    @property
    def patches_per_frame(self) -> int:
        return self.rows * self.cols

    def patch_extent(self, h: int, w: int) -> tuple[int, int]:
        if h % self.rows or w % self.cols:
            raise ConfigurationError(
                f"Feature map {h}x{w} does not split into a {self.rows}x{self.cols} patch grid"
            )
        return h // self.rows, w // self.cols

    def token_length(self, c: int, h: int, w: int) -> int:
        ph, pw = self.patch_extent(h, w)
        return c * ph * pw


class BlockParams(Module):
    """Projections of one transformer block; every one keeps c channels."""

    def __init__(self, channels: int, rng: SplitMix64, ffn_expansion: int = 4):
        super().__init__()
        c = channels
        self.p_q = Conv2d(c, c, 1, rng)
        self.p_k = Conv2d(c, c, 1, rng)
        self.p_v = Conv2d(c, c, 1, rng)
        self.p_v_dw = Conv2d(c, c, 3, rng, padding=1, groups=c)
        self.p_f = Conv2d(c, c, 1, rng)
        self.ffn_in = Conv2d(c, ffn_expansion * c, 1, rng)
        self.ffn_out = Conv2d(ffn_expansion * c, c, 1, rng)


def project_qkv(f_prev: Array, params: BlockParams) -> tuple[Array, Array, Array]:
    """Q = P_Q(F), K = P_K(F), V = P_V(F) + P'_V(F) with P'_V depth-wise 3x3."""
    c = params.p_q.weight.shape[1]
    if f_prev.ndim != 4 or f_prev.shape[1] != c:
        raise ContractError(f"Block expects N x {c} x h x w input, got {f_prev.shape}")
    q = params.p_q(f_prev)
    k = params.p_k(f_prev)
    v = params.p_v(f_prev) + params.p_v_dw(f_prev)
    return q, k, v


def patchify(x: Array, grid: PatchGrid, frames: Optional[int] = None) -> Array:
    """(B*T) x c x h x w -> B x (T*n) x (c * h/r1 * w/r2), patches in row-major order.

    ``frames`` is the clip length T; by default the whole input is one clip.
    """
    n_frames, c, h, w = x.shape
    t = frames or n_frames
    if n_frames % t:
        raise ContractError(f"{n_frames} frames do not split into clips of {t}")
    b = n_frames // t
    ph, pw = grid.patch_extent(h, w)
    r1, r2 = grid.rows, grid.cols
    x = x.reshape(b, t, c, r1, ph, r2, pw)
    x = x.transpose(0, 1, 3, 5, 2, 4, 6)
    return x.reshape(b, t * r1 * r2, c * ph * pw)


def unpatchify(tokens: Array, grid: PatchGrid, channels: int, h: int, w: int) -> Array:
    """Inverse of ``patchify``."""
    b, n_tokens, _ = tokens.shape
    ph, pw = grid.patch_extent(h, w)
    r1, r2 = grid.rows, grid.cols
    t = n_tokens // (r1 * r2)
    x = tokens.reshape(b, t, r1, r2, channels, ph, pw)
    x = x.transpose(0, 1, 4, 2, 5, 3, 6)
    return x.reshape(b * t, channels, h, w)


def token_mask_from_pixels(mask: np.ndarray, grid: PatchGrid) -> np.ndarray:
    """Per-token validity from a full-resolution corruption mask.

    Args:
        mask: T x H x W x 1 or B x T x H x W x 1, 0 = corrupted, 1 = valid
        grid: Patch grid

    Returns:
        B x (T*n) boolean array; a token is invalid iff every pixel of its
        patch is corrupted in its frame
    """
    m = np.asarray(mask)
    if m.ndim == 4:
        m = m[None]
    if m.ndim != 5:
        raise ContractError(f"Expected a T x H x W x 1 mask, got shape {m.shape}")
    b, t, h, w, _ = m.shape
    ph, pw = grid.patch_extent(h, w)
    m = m[..., 0].reshape(b, t, grid.rows, ph, grid.cols, pw)
    valid = (m > 0.5).any(axis=(3, 5))
    return valid.reshape(b, t * grid.patches_per_frame)


def attention_weights(qp: Array, kp: Array, token_mask: np.ndarray, grid: PatchGrid, c: int,
                      mask_rule: str = "additive") -> Array:
    """softmax(S (masked)) with S = Qp Kp^T / sqrt(r1 * r2 * c)."""
    if mask_rule not in MASK_RULES:
        raise ConfigurationError(f"Unknown mask rule '{mask_rule}', expected one of {MASK_RULES}")
    token_mask = np.asarray(token_mask, dtype=bool)
    if token_mask.ndim == 1:
        token_mask = token_mask[None]
    if token_mask.shape != qp.shape[:2]:
        raise ContractError(f"Token mask {token_mask.shape} does not match {qp.shape[:2]} tokens")
    scale = math.sqrt(grid.rows * grid.cols * c)
    scores = ops.matmul(qp, kp.transpose(0, 2, 1)) / scale
    key_valid = token_mask[:, None, :]
    if mask_rule == "additive":
        invalid = np.broadcast_to(~key_valid, scores.shape)
        scores = ops.masked_fill(scores, invalid, -np.inf)
    else:
        scores = scores * Array(key_valid.astype(np.float64), dtype=scores.dtype.type)
    return ops.softmax(scores, axis=-1)


def compute_attention(qp: Array, kp: Array, vp: Array, token_mask: np.ndarray, grid: PatchGrid,
                      c: int, mask_rule: str = "additive") -> Array:
    """Masked patch attention: softmax(S masked) Vp.

    Under the additive rule key tokens that are fully corrupted get exactly
    zero weight; if every key is masked, every query returns zeros.
    """
    weights = attention_weights(qp, kp, token_mask, grid, c, mask_rule)
    return ops.matmul(weights, vp)


def block_forward(f_prev: Array, mask: np.ndarray, params: BlockParams, grid: PatchGrid,
                  frames: Optional[int] = None, mask_rule: str = "additive") -> tuple[Array, Array]:
    """One transformer block.

    Returns:
        (f_next, f_att): the block output
        ``x + FFN(x)`` with ``x = f_prev + P_F(f_att)``, and the attention
        output kept for the depth head
    """
    _, c, h, w = f_prev.shape
    q, k, v = project_qkv(f_prev, params)
    token_mask = token_mask_from_pixels(mask, grid)
    qp, kp, vp = (patchify(a, grid, frames) for a in (q, k, v))
    att = compute_attention(qp, kp, vp, token_mask, grid, c, mask_rule)
    f_att = unpatchify(att, grid, c, h, w)
    x = f_prev + params.p_f(f_att)
    f_next = x + params.ffn_out(ops.relu(params.ffn_in(x)))
    return f_next, f_att


def depth_block_indices(num_blocks: int, selection: str = "all") -> list[int]:
    """Blocks whose attention output feeds the depth head."""
    half = num_blocks // 2
    if selection == "all":
        return list(range(num_blocks))
    if selection == "first_half":
        return list(range(max(half, 1)))
    if selection == "last_half":
        return list(range(num_blocks - max(half, 1), num_blocks))
    raise ConfigurationError(f"Unknown depth block selection '{selection}'")


def estimate_depth(f_att_all: Sequence[Array], projections: Sequence[Conv2d], depth_decoder: Decoder,
                   blocks: Optional[Sequence[int]] = None, batch: int = 1, squeeze: bool = True) -> Array:
    """D_hat = Dec_D(sum_i P_D^i(F_att^i)).

    Args:
        f_att_all: Attention outputs of all N_s blocks
        projections: The N_s 1x1 projections P_D^i
        depth_decoder: One-channel sigmoid decoder
        blocks: Indices to aggregate (all by default)
        batch: Number of clips folded into the frame axis

    Raises:
        ContractError: If the number of attention outputs differs from the number of projections
    """
    if len(f_att_all) != len(projections):
        raise ContractError(f"Depth head expects {len(projections)} block outputs, got {len(f_att_all)}")
    selected = list(range(len(projections))) if blocks is None else list(blocks)
    if not selected:
        raise ConfigurationError("Depth head needs at least one block")
    total = None
    for i in selected:
        term = projections[i](f_att_all[i])
        total = term if total is None else total + term
    depth = depth_decoder(total)
    n = depth.shape[0]
    return frames_to_clip(depth, batch, n // batch, squeeze and batch == 1)


class STGDE(Module):
    """N_s blocks, their depth projections and the depth decoder."""

    def __init__(self, channels: int, num_blocks: int, base_channels: int, rng: SplitMix64,
                 grid: PatchGrid = PatchGrid(), ffn_expansion: int = 4, mask_rule: str = "additive",
                 depth_blocks: str = "all"):
        super().__init__()
        if num_blocks < 1:
            raise ConfigurationError(f"Need at least one transformer block, got {num_blocks}")
        if mask_rule not in MASK_RULES:
            raise ConfigurationError(f"Unknown mask rule '{mask_rule}'")
        self.grid = grid
        self.mask_rule = mask_rule
        self.depth_selection = depth_block_indices(num_blocks, depth_blocks)
        self.blocks = [BlockParams(channels, rng, ffn_expansion) for _ in range(num_blocks)]
        self.depth_projections = [Conv2d(channels, channels, 1, rng) for _ in range(num_blocks)]
        self.depth_decoder = Decoder(DecoderSpec(base_channels, out_channels=1), rng)

    def forward(self, features: Array, mask: np.ndarray, frames: int, batch: int = 1):
        """Run all blocks; returns (F^{N_s}, depth clip B x T x H x W x 1)."""
        f = features
        attention_outputs = []
        for params in self.blocks:
            f, f_att = block_forward(f, mask, params, self.grid, frames, self.mask_rule)
            attention_outputs.append(f_att)
        depth = estimate_depth(attention_outputs, self.depth_projections, self.depth_decoder,
                               self.depth_selection, batch=batch, squeeze=False)
        return f, depth
