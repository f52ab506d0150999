"""Differentiable primitives: elementwise math, reductions, shape ops, matmul, softmax.

Every public function here is a thin wrapper around ``<Primitive>.apply``
so callers never touch the ``Function`` classes directly.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from numerics.array import Array, Function, as_array
from utils.errors import ContractError, DimensionError, NumericalError


def unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum ``grad`` back down to ``shape`` after numpy broadcasting."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, dim in enumerate(shape) if dim == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


def _normalize_axes(axis, ndim: int) -> Optional[tuple[int, ...]]:
    if axis is None:
        return None
    if isinstance(axis, int):
        axis = (axis,)
    return tuple(a % ndim for a in axis)


# -- elementwise ----------------------------------------------------------------


class Add(Function):
    def forward(self, a, b):
        self.shapes = (a.shape, b.shape)
        return a + b

    def backward(self, g):
        return unbroadcast(g, self.shapes[0]), unbroadcast(g, self.shapes[1])


class Sub(Function):
    def forward(self, a, b):
        self.shapes = (a.shape, b.shape)
        return a - b

    def backward(self, g):
        return unbroadcast(g, self.shapes[0]), unbroadcast(-g, self.shapes[1])


class Mul(Function):
    def forward(self, a, b):
        self.a, self.b = a, b
        return a * b

    def backward(self, g):
        return unbroadcast(g * self.b, self.a.shape), unbroadcast(g * self.a, self.b.shape)


class Div(Function):
    def forward(self, a, b):
        self.a, self.b = a, b
        return a / b

    def backward(self, g):
        ga = g / self.b
        gb = -g * self.a / (self.b * self.b)
        return unbroadcast(ga, self.a.shape), unbroadcast(gb, self.b.shape)


class Neg(Function):
    def forward(self, a):
        return -a

    def backward(self, g):
        return (-g,)


class Exp(Function):
    def forward(self, a):
        self.out = np.exp(a)
        return self.out

    def backward(self, g):
        return (g * self.out,)


class Log(Function):
    def forward(self, a):
        self.a = a
        return np.log(a)

    def backward(self, g):
        return (g / self.a,)


class Sqrt(Function):
    def forward(self, a):
        self.out = np.sqrt(a)
        return self.out

    def backward(self, g):
        return (g * 0.5 / self.out,)


class Abs(Function):
    def forward(self, a):
        self.sign = np.sign(a)
        return np.abs(a)

    def backward(self, g):
        return (g * self.sign,)


class Relu(Function):
    def forward(self, a):
        self.active = a > 0
        return np.where(self.active, a, 0).astype(a.dtype)

    def backward(self, g):
        return (np.where(self.active, g, 0).astype(g.dtype),)


class LeakyRelu(Function):
    def forward(self, a, slope=0.2):
        self.scale = np.where(a > 0, 1.0, slope).astype(a.dtype)
        return a * self.scale

    def backward(self, g):
        return (g * self.scale,)


class Sigmoid(Function):
    def forward(self, a):
        # Split by sign so exp never overflows.
        pos = a >= 0
        z = np.exp(-np.abs(a))
        self.out = np.where(pos, 1.0 / (1.0 + z), z / (1.0 + z)).astype(a.dtype)
        return self.out

    def backward(self, g):
        return (g * self.out * (1.0 - self.out),)


class MaskedFill(Function):
    allows_sentinel = True

    def forward(self, a, mask, value=-np.inf):
        self.mask = mask.astype(bool)
        return np.where(self.mask, np.asarray(value, dtype=a.dtype), a)

    def backward(self, g):
        return np.where(self.mask, 0, g).astype(g.dtype), None


# -- reductions -----------------------------------------------------------------


class Sum(Function):
    def forward(self, a, axis=None, keepdims=False):
        self.shape = a.shape
        self.axis = _normalize_axes(axis, a.ndim)
        self.keepdims = keepdims
        return np.sum(a, axis=self.axis, keepdims=keepdims)

    def backward(self, g):
        if self.axis is not None and not self.keepdims:
            g = np.expand_dims(g, self.axis)
        return (np.broadcast_to(g, self.shape).copy(),)


class Mean(Function):
    def forward(self, a, axis=None, keepdims=False):
        self.shape = a.shape
        self.axis = _normalize_axes(axis, a.ndim)
        self.keepdims = keepdims
        axes = self.axis if self.axis is not None else tuple(range(a.ndim))
        self.count = int(np.prod([a.shape[i] for i in axes])) if axes else 1
        return np.mean(a, axis=self.axis, keepdims=keepdims)

    def backward(self, g):
        if self.axis is not None and not self.keepdims:
            g = np.expand_dims(g, self.axis)
        return (np.broadcast_to(g / self.count, self.shape).copy(),)


# -- shape ----------------------------------------------------------------------


class Reshape(Function):
    def forward(self, a, shape=()):
        self.shape = a.shape
        return a.reshape(shape)

    def backward(self, g):
        return (g.reshape(self.shape),)


class Transpose(Function):
    def forward(self, a, axes=None):
        self.axes = tuple(axes) if axes is not None else tuple(reversed(range(a.ndim)))
        return np.transpose(a, self.axes)

    def backward(self, g):
        return (np.transpose(g, np.argsort(self.axes)),)


class Concat(Function):
    def forward(self, *arrays, axis=0):
        self.axis = axis
        self.sizes = [a.shape[axis] for a in arrays]
        return np.concatenate(arrays, axis=axis)

    def backward(self, g):
        bounds = np.cumsum(self.sizes)[:-1]
        return tuple(np.split(g, bounds, axis=self.axis))


class Slice(Function):
    def forward(self, a, index=None):
        self.shape = a.shape
        self.index = index
        return a[index]

    def backward(self, g):
        out = np.zeros(self.shape, dtype=g.dtype)
        np.add.at(out, self.index, g)
        return (out,)


class UpsampleNearest(Function):
    def forward(self, a, factor=2):
        self.factor = factor
        return np.repeat(np.repeat(a, factor, axis=-2), factor, axis=-1)

    def backward(self, g):
        f = self.factor
        *lead, h, w = g.shape
        g = g.reshape(*lead, h // f, f, w // f, f)
        return (g.sum(axis=(-3, -1)),)


class Pad(Function):
    def forward(self, a, widths=(), mode="constant"):
        if mode not in ("constant", "edge"):
            raise ContractError(f"Unsupported pad mode: {mode}")
        self.widths = [tuple(w) for w in widths]
        self.mode = mode
        self.shape = a.shape
        return np.pad(a, self.widths, mode=mode)

    def backward(self, g):
        if self.mode == "constant":
            core = tuple(slice(lo, g.shape[i] - hi) for i, (lo, hi) in enumerate(self.widths))
            return (g[core].copy(),)
        # Edge padding is separable: undo one axis at a time, last padded first.
        for axis in reversed(range(len(self.widths))):
            lo, hi = self.widths[axis]
            if lo == 0 and hi == 0:
                continue
            n = g.shape[axis]
            core = np.take(g, np.arange(lo, n - hi), axis=axis).copy()
            head = np.take(g, np.arange(0, lo), axis=axis).sum(axis=axis)
            tail = np.take(g, np.arange(n - hi, n), axis=axis).sum(axis=axis)
            first = [slice(None)] * g.ndim
            first[axis] = 0
            last = [slice(None)] * g.ndim
            last[axis] = -1
            core[tuple(first)] += head
            core[tuple(last)] += tail
            g = core
        return (g,)


# -- linear algebra -------------------------------------------------------------


class MatMul(Function):
    def forward(self, a, b):
        if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
            raise DimensionError(f"matmul extents do not match: {a.shape} @ {b.shape}")
        self.a, self.b = a, b
        return np.matmul(a, b)

    def backward(self, g):
        ga = np.matmul(g, np.swapaxes(self.b, -1, -2))
        gb = np.matmul(np.swapaxes(self.a, -1, -2), g)
        return unbroadcast(ga, self.a.shape), unbroadcast(gb, self.b.shape)


class Softmax(Function):
    def forward(self, a, axis=-1):
        if np.isnan(a).any() or np.isposinf(a).any():
            raise NumericalError("softmax input holds NaN or +inf")
        self.axis = axis
        m = np.max(a, axis=axis, keepdims=True)
        dead = np.isneginf(m)
        m = np.where(dead, 0, m)
        e = np.exp(a - m)
        s = np.sum(e, axis=axis, keepdims=True)
        out = np.where(dead, 0, e / np.where(dead, 1, s))
        self.out = out.astype(a.dtype)
        return self.out

    def backward(self, g):
        y = self.out
        return (y * (g - np.sum(g * y, axis=self.axis, keepdims=True)),)


# -- public wrappers -----------------------------------------------------------


def add(a, b) -> Array:
    return Add.apply(a, b)


def sub(a, b) -> Array:
    return Sub.apply(a, b)


def mul(a, b) -> Array:
    return Mul.apply(a, b)


def div(a, b) -> Array:
    return Div.apply(a, b)


def neg(a) -> Array:
    return Neg.apply(a)


def exp(a) -> Array:
    return Exp.apply(a)


def log(a) -> Array:
    return Log.apply(a)


def sqrt(a) -> Array:
    return Sqrt.apply(a)


def abs_(a) -> Array:
    return Abs.apply(a)


def relu(a) -> Array:
    return Relu.apply(a)


def leaky_relu(a, slope: float = 0.2) -> Array:
    return LeakyRelu.apply(a, slope=slope)


def sigmoid(a) -> Array:
    return Sigmoid.apply(a)


def masked_fill(a, mask, value: float = -np.inf) -> Array:
    """Replace entries where ``mask`` is true by ``value`` (default the -inf sentinel)."""
    mask = mask.data if isinstance(mask, Array) else np.asarray(mask)
    return MaskedFill.apply(a, Array(mask.astype(np.float64), dtype=np.float64), value=value)


def sum_(a, axis=None, keepdims: bool = False) -> Array:
    return Sum.apply(a, axis=axis, keepdims=keepdims)


def mean(a, axis=None, keepdims: bool = False) -> Array:
    return Mean.apply(a, axis=axis, keepdims=keepdims)


def reshape(a, shape: Sequence[int]) -> Array:
    return Reshape.apply(a, shape=tuple(shape))


def transpose(a, axes: Optional[Sequence[int]] = None) -> Array:
    return Transpose.apply(a, axes=axes)


def concat(arrays: Sequence, axis: int = 0) -> Array:
    return Concat.apply(*arrays, axis=axis)


def slice_(a, index) -> Array:
    return Slice.apply(a, index=index)


def upsample_nearest(a, factor: int = 2) -> Array:
    """Nearest-neighbour upsampling of the last two axes."""
    return UpsampleNearest.apply(a, factor=factor)


def pad(a, widths: Sequence[Sequence[int]], mode: str = "constant") -> Array:
    return Pad.apply(a, widths=widths, mode=mode)


def matmul(a, b) -> Array:
    a, b = as_array(a), as_array(b)
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise DimensionError(f"matmul extents do not match: {a.shape} @ {b.shape}")
    return MatMul.apply(a, b)


def softmax(a, axis: int = -1) -> Array:
    """Exp-normalize along ``axis``; rows made only of -inf return zeros."""
    return Softmax.apply(a, axis=axis)
