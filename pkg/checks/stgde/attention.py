"""Masked patch attention, transformer blocks and the depth head."""

import numpy as np

from checks._decorators import COMPOSITE_ENTRIES, COMPOSITE_EPS, gradcheck
from checks.runner import Contraction, GradCase
from model.codec import Decoder, DecoderSpec
from model.stgde import BlockParams, PatchGrid, block_forward, compute_attention, estimate_depth
from numerics import Conv2d

GRID = PatchGrid(2, 2)


def _pixel_mask(rng, frames: int, size: int = 8) -> np.ndarray:
    """Random corruption with the first patch of frame 0 kept valid."""
    mask = (rng.uniform((1, frames, size, size, 1)) > 0.7).astype(np.float64)
    mask[0, 0, 0, 0, 0] = 1.0
    return mask


def _attention_case(rng, rule: str) -> GradCase:
    c, frames = 2, 2
    tokens = frames * GRID.patches_per_frame
    token_mask = rng.uniform((1, tokens)) > 0.4
    token_mask[0, 0] = True
    inputs = {name: rng.normal((1, tokens, c * 2 * 2)) for name in ("qp", "kp", "vp")}
    contraction = Contraction(rng)
    return GradCase(
        lambda q, k, v: contraction(compute_attention(q, k, v, token_mask, GRID, c, rule)),
        inputs,
    )


@gradcheck(domain="stgde", tags=["attention"])
def attention_additive(rng):
    """Masked keys filled with -inf before the softmax."""
    return _attention_case(rng, "additive")


@gradcheck(domain="stgde", tags=["attention"])
def attention_multiplicative(rng):
    return _attention_case(rng, "multiplicative")


@gradcheck(domain="stgde", tags=["block"], eps=COMPOSITE_EPS, tolerance=1e-4, entries=COMPOSITE_ENTRIES)
def transformer_block(rng):
    params = BlockParams(4, rng, ffn_expansion=2)
    mask = _pixel_mask(rng, frames=2)
    inputs = {
        "f_prev": rng.normal((2, 4, 4, 4)),
        "p_v_dw": params.p_v_dw.weight.data.copy(),
        "p_q": params.p_q.weight.data.copy(),
    }
    c = Contraction(rng)

    def loss(f, w_dw, w_q):
        params.p_v_dw.weight = w_dw
        params.p_q.weight = w_q
        f_next, f_att = block_forward(f, mask, params, GRID, frames=2)
        return c(f_next) + c(f_att)

    return GradCase(loss, inputs)


@gradcheck(domain="stgde", tags=["depth"], eps=COMPOSITE_EPS, tolerance=1e-4, entries=COMPOSITE_ENTRIES)
def depth_head(rng):
    projections = [Conv2d(8, 8, 1, rng) for _ in range(3)]
    decoder = Decoder(DecoderSpec(base_channels=2, out_channels=1), rng)
    inputs = {f"f_att_{i}": rng.normal((2, 8, 2, 2)) for i in range(3)}
    c = Contraction(rng)
    return GradCase(lambda *f_att: c(estimate_depth(list(f_att), projections, decoder, blocks=[0, 2])), inputs)
