"""Differentiable dense-array engine.

Usage:
    from numerics import Array, Tape, backward, ops

    x = Array(np.ones((2, 2)), requires_grad=True)
    with Tape() as tape:
        loss = ops.sum_(x * x)
    grads = backward(loss, tape)
"""

from numerics import ops
from numerics.array import (
    Array,
    Function,
    GradientMap,
    Tape,
    active_tape,
    as_array,
    backward,
    get_default_dtype,
    precision,
    set_default_dtype,
    set_finite_checks,
)
from numerics.conv import conv2d, conv3d
from numerics.grad_check import finite_diff_grad, relative_error
from numerics.module import Conv2d, Conv3d, Module, SpectralNormConv3d, freeze
from numerics.optim import Adam, AdamState, adam_step
from numerics.rng import SplitMix64

__all__ = [
    "ops",
    "Array",
    "Function",
    "GradientMap",
    "Tape",
    "active_tape",
    "as_array",
    "backward",
    "get_default_dtype",
    "precision",
    "set_default_dtype",
    "set_finite_checks",
    "conv2d",
    "conv3d",
    "finite_diff_grad",
    "relative_error",
    "Conv2d",
    "Conv3d",
    "Module",
    "SpectralNormConv3d",
    "freeze",
    "Adam",
    "AdamState",
    "adam_step",
    "SplitMix64",
]
