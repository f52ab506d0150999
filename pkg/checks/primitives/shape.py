"""Reductions, layout changes, padding and resampling."""

import numpy as np

from checks._decorators import gradcheck
from checks.runner import Contraction, GradCase
from numerics import ops


@gradcheck(domain="primitives", tags=["reduction"])
def sum_axis(rng):
    c = Contraction(rng)
    return GradCase(lambda a: c(ops.sum_(a, axis=(0, 2), keepdims=True)), {"a": rng.normal((2, 3, 4))})


@gradcheck(domain="primitives", tags=["reduction"])
def mean_axis(rng):
    c = Contraction(rng)
    return GradCase(lambda a: c(ops.mean(a, axis=-1)), {"a": rng.normal((2, 3, 4))})


@gradcheck(domain="primitives", tags=["layout"])
def reshape_transpose(rng):
    c = Contraction(rng)
    return GradCase(
        lambda a: c(ops.transpose(ops.reshape(a, (2, 6, 2)), (2, 0, 1))),
        {"a": rng.normal((4, 3, 2))},
    )


@gradcheck(domain="primitives", tags=["layout"])
def concat(rng):
    inputs = {"a": rng.normal((2, 1, 3)), "b": rng.normal((2, 2, 3))}
    c = Contraction(rng)
    return GradCase(lambda a, b: c(ops.concat([a, b, a], axis=1)), inputs)


@gradcheck(domain="primitives", tags=["layout"])
def slice_repeated_index(rng):
    """Fancy indexing that picks some rows twice."""
    index = (np.array([0, 2, 2, 1]), slice(1, None))
    c = Contraction(rng)
    return GradCase(lambda a: c(ops.slice_(a, index)), {"a": rng.normal((3, 4))})


@gradcheck(domain="primitives", tags=["resample"])
def upsample_nearest(rng):
    c = Contraction(rng)
    return GradCase(lambda a: c(ops.upsample_nearest(a, 2)), {"a": rng.normal((1, 2, 3, 3))})


@gradcheck(domain="primitives", tags=["padding"])
def pad_constant(rng):
    c = Contraction(rng)
    widths = [(0, 0), (1, 2), (2, 1)]
    return GradCase(lambda a: c(ops.pad(a, widths, mode="constant")), {"a": rng.normal((2, 3, 3))})


@gradcheck(domain="primitives", tags=["padding"])
def pad_edge(rng):
    c = Contraction(rng)
    widths = [(0, 0), (0, 0), (1, 2), (2, 1)]
    return GradCase(lambda a: c(ops.pad(a, widths, mode="edge")), {"a": rng.normal((1, 2, 3, 4))})


@gradcheck(domain="primitives", tags=["masking"])
def masked_fill_zero(rng):
    mask = rng.uniform((3, 4)) < 0.4
    c = Contraction(rng)
    return GradCase(lambda a: c(ops.masked_fill(a, mask, 0.0)), {"a": rng.normal((3, 4))})
