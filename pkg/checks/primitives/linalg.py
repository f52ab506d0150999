"""Matrix products, masked softmax and convolutions."""

from checks._decorators import gradcheck
from checks.runner import Contraction, GradCase
from numerics import conv2d, conv3d, ops


@gradcheck(domain="primitives", tags=["linalg", "broadcast"])
def matmul_batched(rng):
    inputs = {"a": rng.normal((2, 3, 4)), "b": rng.normal((4, 5))}
    c = Contraction(rng)
    return GradCase(lambda a, b: c(ops.matmul(a, b)), inputs)


@gradcheck(domain="primitives", tags=["linalg"])
def softmax(rng):
    c = Contraction(rng)
    return GradCase(lambda a: c(ops.softmax(a, axis=-1)), {"a": rng.normal((2, 3, 5))})


@gradcheck(domain="primitives", tags=["linalg", "masking"])
def masked_softmax(rng):
    """-inf sentinels on some columns, including one fully masked row."""
    mask = rng.uniform((3, 5)) < 0.4
    mask[1] = True
    mask[0, 0] = False
    c = Contraction(rng)
    return GradCase(lambda a: c(ops.softmax(ops.masked_fill(a, mask), axis=-1)), {"a": rng.normal((3, 5))})


@gradcheck(domain="primitives", tags=["conv"])
def conv2d_strided(rng):
    inputs = {"x": rng.normal((2, 2, 5, 5)), "w": rng.normal((3, 2, 3, 3)), "b": rng.normal((3,))}
    c = Contraction(rng)
    return GradCase(lambda x, w, b: c(conv2d(x, w, b, stride=2, padding=1)), inputs)


@gradcheck(domain="primitives", tags=["conv"])
def conv2d_grouped(rng):
    """Two input channels per group, the layout of paired fusion."""
    inputs = {"x": rng.normal((1, 4, 4, 4)), "w": rng.normal((2, 2, 3, 3))}
    c = Contraction(rng)
    return GradCase(lambda x, w: c(conv2d(x, w, stride=1, padding=1, groups=2)), inputs)


@gradcheck(domain="primitives", tags=["conv"])
def conv2d_depthwise(rng):
    inputs = {"x": rng.normal((1, 3, 4, 4)), "w": rng.normal((3, 1, 3, 3))}
    c = Contraction(rng)
    return GradCase(lambda x, w: c(conv2d(x, w, padding=1, groups=3)), inputs)


@gradcheck(domain="primitives", tags=["conv"])
def conv3d_strided(rng):
    inputs = {"x": rng.normal((1, 2, 3, 4, 4)), "w": rng.normal((2, 2, 3, 3, 3)), "b": rng.normal((2,))}
    c = Contraction(rng)
    return GradCase(lambda x, w, b: c(conv3d(x, w, b, stride=(1, 2, 2), padding=1)), inputs)
