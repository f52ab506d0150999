"""Grouped cross-correlation over two or three spatial axes.

Windows are gathered with ``sliding_window_view`` and laid out as one
im2col matrix per group, G x (N * out) x (Cin/G * k), so both the forward
pass and the two gradients are batched ``np.matmul`` calls. The input
gradient is scattered back one kernel offset at a time in a fixed order,
so results are reproducible bit for bit.
"""

from __future__ import annotations

import itertools
import math
from typing import Optional, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from numerics.array import Array, Function, as_array
from utils.errors import ConfigurationError, DimensionError


def _as_tuple(value: int | Sequence[int], nd: int) -> tuple[int, ...]:
    if isinstance(value, int):
        return (value,) * nd
    value = tuple(int(v) for v in value)
    if len(value) != nd:
        raise ConfigurationError(f"Expected {nd} values, got {value}")
    return value


def check_conv_shapes(x_shape, w_shape, groups: int) -> None:
    """Validate channel bookkeeping shared by conv2d and conv3d."""
    cin, cout = x_shape[1], w_shape[0]
    if groups < 1 or cin % groups or cout % groups:
        raise ConfigurationError(
            f"Channels must divide into groups: Cin={cin}, Cout={cout}, groups={groups}"
        )
    if w_shape[1] != cin // groups:
        raise DimensionError(
            f"Weight expects {w_shape[1]} input channels per group, input gives {cin // groups}"
        )


def im2col(xp: np.ndarray, kernel: tuple[int, ...], stride: tuple[int, ...], groups: int):
    """Patch matrix of a padded input.

    Args:
        xp: Padded input, N x Cin x *spatial
        kernel: Kernel extents
        stride: Step per spatial axis
        groups: Channel groups

    Returns:
        ``(cols, out_spatial)`` with ``cols`` of shape
        G x (N * prod(out_spatial)) x (Cin/G * prod(kernel))
    """
    nd = len(kernel)
    n, cin = xp.shape[:2]
    cg = cin // groups
    win = sliding_window_view(xp, kernel, axis=tuple(range(2, 2 + nd)))
    win = win[(slice(None), slice(None)) + tuple(slice(None, None, s) for s in stride)]
    out_spatial = win.shape[2:2 + nd]
    # n, g, c, out..., k... -> g, n, out..., c, k...
    win = win.reshape((n, groups, cg) + win.shape[2:])
    order = (1, 0) + tuple(range(3, 3 + nd)) + (2,) + tuple(range(3 + nd, 3 + 2 * nd))
    cols = np.ascontiguousarray(win.transpose(order)).reshape(groups, -1, cg * math.prod(kernel))
    return cols, out_spatial


class ConvNd(Function):
    """Forward/backward for a grouped N-d convolution with zero padding."""

    def forward(self, x, w, b=None, stride=1, padding=0, groups=1):
        nd = x.ndim - 2
        self.nd = nd
        self.stride = _as_tuple(stride, nd)
        self.padding = _as_tuple(padding, nd)
        self.groups = groups
        self.x_shape, self.w_shape = x.shape, w.shape
        self.has_bias = b is not None

        n = x.shape[0]
        cout = w.shape[0]
        kernel = tuple(w.shape[2:])
        widths = [(0, 0), (0, 0)] + [(p, p) for p in self.padding]
        xp = np.pad(x, widths)
        self.padded_shape = xp.shape
        for size, k in zip(xp.shape[2:], kernel):
            if size < k:
                raise DimensionError(f"Kernel {kernel} larger than padded input {xp.shape[2:]}")

        self.kernel = kernel
        self.cols, self.out_spatial = im2col(xp, kernel, self.stride, groups)
        self.wmat = w.reshape(groups, cout // groups, -1)

        out = np.matmul(self.cols, self.wmat.transpose(0, 2, 1))
        # g, n, out..., o -> n, g, o, out...
        out = out.reshape((groups, n) + self.out_spatial + (cout // groups,))
        out = out.transpose((1, 0, 2 + nd) + tuple(range(2, 2 + nd)))
        out = out.reshape((n, cout) + self.out_spatial)
        if b is not None:
            out = out + b.reshape((1, cout) + (1,) * nd)
        return out

    def backward(self, g):
        n, cout = g.shape[:2]
        groups, nd = self.groups, self.nd
        og = cout // groups
        cin = self.x_shape[1]
        cg = cin // groups

        gmat = g.reshape((n, groups, og) + self.out_spatial)
        gmat = gmat.transpose((1, 0) + tuple(range(3, 3 + nd)) + (2,))
        gmat = np.ascontiguousarray(gmat).reshape(groups, -1, og)

        gw = np.matmul(gmat.transpose(0, 2, 1), self.cols).reshape(self.w_shape)

        gcols = np.matmul(gmat, self.wmat)
        # g, n, out..., c, k... -> n, g, c, out..., k...
        gcols = gcols.reshape((groups, n) + self.out_spatial + (cg,) + self.kernel)
        order = (1, 0, 2 + nd) + tuple(range(2, 2 + nd)) + tuple(range(3 + nd, 3 + 2 * nd))
        gwin = gcols.transpose(order).reshape((n, cin) + self.out_spatial + self.kernel)

        gxp = np.zeros(self.padded_shape, dtype=g.dtype)
        for offset in itertools.product(*[range(k) for k in self.kernel]):
            target = (slice(None), slice(None)) + tuple(
                slice(o, o + s * (length - 1) + 1, s)
                for o, s, length in zip(offset, self.stride, self.out_spatial)
            )
            gxp[target] += gwin[(Ellipsis,) + offset]
        core = (slice(None), slice(None)) + tuple(
            slice(p, size - p) for p, size in zip(self.padding, self.padded_shape[2:])
        )
        gx = gxp[core]

        gb = g.sum(axis=(0,) + tuple(range(2, 2 + nd))) if self.has_bias else None
        return gx, gw, gb


def _conv(x, w, bias, stride, padding, groups, nd: int) -> Array:
    x, w = as_array(x), as_array(w)
    if x.ndim != nd + 2 or w.ndim != nd + 2:
        raise DimensionError(f"conv{nd}d expects {nd + 2}-d input and weight, got {x.shape}, {w.shape}")
    check_conv_shapes(x.shape, w.shape, groups)
    if bias is not None:
        bias = as_array(bias)
        if bias.shape != (w.shape[0],):
            raise DimensionError(f"Bias shape {bias.shape} does not match {w.shape[0]} outputs")
        return ConvNd.apply(x, w, bias, stride=stride, padding=padding, groups=groups)
    return ConvNd.apply(x, w, stride=stride, padding=padding, groups=groups)


def conv2d(
    x,
    w,
    bias: Optional[Array] = None,
    stride: int | Sequence[int] = 1,
    padding: int | Sequence[int] = 0,
    groups: int = 1,
) -> Array:
    """Grouped 2-D cross-correlation with zero padding.

    Args:
        x: Input of shape N x Cin x H x W
        w: Weight of shape Cout x (Cin / groups) x kh x kw
        bias: Optional Cout vector
        stride: Step along H and W
        padding: Zeros added on each side of H and W
        groups: Channel groups; ``groups == Cin`` is the depth-wise case

    Returns:
        N x Cout x H' x W' array

    Raises:
        ConfigurationError: If Cin or Cout is not divisible by ``groups``
    """
    return _conv(x, w, bias, stride, padding, groups, nd=2)


def conv3d(
    x,
    w,
    bias: Optional[Array] = None,
    stride: int | Sequence[int] = 1,
    padding: int | Sequence[int] = 0,
    groups: int = 1,
) -> Array:
    """Grouped 3-D cross-correlation (N x Cin x T x H x W), same contract as ``conv2d``."""
    return _conv(x, w, bias, stride, padding, groups, nd=3)
