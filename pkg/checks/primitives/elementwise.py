"""Elementwise arithmetic and activations."""

from checks._decorators import gradcheck
from checks.runner import Contraction, GradCase, away_from_zero
from numerics import ops


@gradcheck(domain="primitives", tags=["elementwise", "broadcast"])
def add_broadcast(rng):
    """a + b with b broadcast along the leading axis."""
    inputs = {"a": rng.normal((3, 4)), "b": rng.normal((1, 4))}
    c = Contraction(rng)
    return GradCase(lambda a, b: c(ops.add(a, b)), inputs)


@gradcheck(domain="primitives", tags=["elementwise", "broadcast"])
def sub_broadcast(rng):
    inputs = {"a": rng.normal((2, 3, 4)), "b": rng.normal((3, 1))}
    c = Contraction(rng)
    return GradCase(lambda a, b: c(ops.sub(a, b)), inputs)


@gradcheck(domain="primitives", tags=["elementwise", "broadcast"])
def mul_broadcast(rng):
    inputs = {"a": rng.normal((2, 3, 4)), "b": rng.normal((4,))}
    c = Contraction(rng)
    return GradCase(lambda a, b: c(ops.mul(a, b)), inputs)


@gradcheck(domain="primitives", tags=["elementwise"])
def div(rng):
    inputs = {"a": rng.normal((3, 4)), "b": away_from_zero(rng, (3, 4), 0.5, 2.0)}
    c = Contraction(rng)
    return GradCase(lambda a, b: c(ops.div(a, b)), inputs)


@gradcheck(domain="primitives", tags=["elementwise"])
def neg(rng):
    c = Contraction(rng)
    return GradCase(lambda a: c(ops.neg(a)), {"a": rng.normal((5,))})


@gradcheck(domain="primitives", tags=["elementwise"])
def exp(rng):
    c = Contraction(rng)
    return GradCase(lambda a: c(ops.exp(a)), {"a": rng.uniform((3, 4), -1.0, 1.0)})


@gradcheck(domain="primitives", tags=["elementwise"])
def log(rng):
    c = Contraction(rng)
    return GradCase(lambda a: c(ops.log(a)), {"a": rng.uniform((3, 4), 0.5, 2.0)})


@gradcheck(domain="primitives", tags=["elementwise"])
def sqrt(rng):
    c = Contraction(rng)
    return GradCase(lambda a: c(ops.sqrt(a)), {"a": rng.uniform((3, 4), 0.5, 2.0)})


@gradcheck(domain="primitives", tags=["elementwise", "kink"])
def abs_(rng):
    c = Contraction(rng)
    return GradCase(lambda a: c(ops.abs_(a)), {"a": away_from_zero(rng, (3, 4))})


@gradcheck(domain="primitives", tags=["activation", "kink"])
def relu(rng):
    c = Contraction(rng)
    return GradCase(lambda a: c(ops.relu(a)), {"a": away_from_zero(rng, (3, 4))})


@gradcheck(domain="primitives", tags=["activation", "kink"])
def leaky_relu(rng):
    c = Contraction(rng)
    return GradCase(lambda a: c(ops.leaky_relu(a, 0.2)), {"a": away_from_zero(rng, (3, 4))})


@gradcheck(domain="primitives", tags=["activation"])
def sigmoid(rng):
    c = Contraction(rng)
    return GradCase(lambda a: c(ops.sigmoid(a)), {"a": rng.normal((3, 4), std=2.0)})
