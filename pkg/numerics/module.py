"""Parameter containers and the layers built from the primitives.

``Module`` walks its attributes to find parameters (``Array`` with
``requires_grad``), buffers (registered names) and child modules,
including modules held in lists.
"""

from __future__ import annotations

import logging
import math
from typing import Iterator

import numpy as np

from numerics import ops
from numerics.array import Array, get_default_dtype
from numerics.conv import conv2d, conv3d
from numerics.rng import SplitMix64
from utils.errors import ContractError

logger = logging.getLogger(__name__)


class Module:
    """Base class for anything that owns parameters."""

    training = True

    def __init__(self):
        self._buffers: list[str] = []

    def register_buffer(self, name: str, value: np.ndarray) -> None:
        setattr(self, name, value)
        if name not in self._buffers:
            self._buffers.append(name)

    def children(self) -> Iterator[tuple[str, "Module"]]:
        for name, value in vars(self).items():
            if isinstance(value, Module):
                yield name, value
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, Module):
                        yield f"{name}.{i}", item

    def named_parameters(self, prefix: str = "") -> dict[str, Array]:
        params: dict[str, Array] = {}
        for name, value in vars(self).items():
            if isinstance(value, Array) and value.requires_grad:
                params[f"{prefix}{name}"] = value
        for name, child in self.children():
            params.update(child.named_parameters(f"{prefix}{name}."))
        return params

    def named_buffers(self, prefix: str = "") -> dict[str, np.ndarray]:
        buffers = {f"{prefix}{name}": getattr(self, name) for name in getattr(self, "_buffers", [])}
        for name, child in self.children():
            buffers.update(child.named_buffers(f"{prefix}{name}."))
        return buffers

    def state_dict(self) -> dict[str, np.ndarray]:
        state = {name: p.data for name, p in self.named_parameters().items()}
        state.update(self.named_buffers())
        return state

    def load_state_dict(self, state: dict[str, np.ndarray]) -> None:
        params = self.named_parameters()
        buffers = self.named_buffers()
        missing = (set(params) | set(buffers)) - set(state)
        if missing:
            raise ContractError(f"State is missing entries: {sorted(missing)[:5]}")
        for name, p in params.items():
            if state[name].shape != p.shape:
                raise ContractError(f"{name}: stored shape {state[name].shape} != {p.shape}")
            p.data = np.array(state[name], dtype=p.data.dtype, copy=True)
        for name in buffers:
            self._set_buffer(name, np.array(state[name], copy=True))

    def _set_buffer(self, dotted: str, value: np.ndarray) -> None:
        owner: Module = self
        *path, leaf = dotted.split(".")
        i = 0
        while i < len(path):
            attr = getattr(owner, path[i])
            if isinstance(attr, (list, tuple)):
                owner = attr[int(path[i + 1])]
                i += 2
            else:
                owner = attr
                i += 1
        setattr(owner, leaf, value)

    def train(self, mode: bool = True) -> "Module":
        self.training = mode
        for _, child in self.children():
            child.train(mode)
        return self

    def eval(self) -> "Module":
        return self.train(False)

    def parameter_count(self) -> int:
        return sum(p.size for p in self.named_parameters().values())

    def __call__(self, *args, **kwargs):
        return self.forward(*args, **kwargs)

    def forward(self, *args, **kwargs):
        raise NotImplementedError


def init_uniform(rng: SplitMix64, shape: tuple[int, ...], fan_in: int) -> Array:
    """U(-1/sqrt(fan_in), 1/sqrt(fan_in)) parameter."""
    bound = 1.0 / math.sqrt(max(fan_in, 1))
    data = rng.uniform(shape, -bound, bound).astype(get_default_dtype())
    return Array(data, requires_grad=True)


def zeros_param(shape: tuple[int, ...]) -> Array:
    return Array(np.zeros(shape, dtype=get_default_dtype()), requires_grad=True)


class Conv2d(Module):
    """2-D convolution layer.

    ``pad_mode="edge"`` replicates border pixels before a padding-free
    convolution; ``"zeros"`` uses the primitive's zero padding.
    """

    def __init__(self, in_channels: int, out_channels: int, kernel_size: int, rng: SplitMix64,
                 stride: int = 1, padding: int = 0, groups: int = 1, pad_mode: str = "zeros",
                 bias: bool = True):
        super().__init__()
        self.stride, self.padding, self.groups, self.pad_mode = stride, padding, groups, pad_mode
        fan_in = (in_channels // groups) * kernel_size * kernel_size
        self.weight = init_uniform(rng, (out_channels, in_channels // groups, kernel_size, kernel_size), fan_in)
        self.bias = zeros_param((out_channels,)) if bias else None

    def forward(self, x: Array) -> Array:
        if self.pad_mode == "edge" and self.padding:
            p = self.padding
            x = ops.pad(x, [(0, 0), (0, 0), (p, p), (p, p)], mode="edge")
            return conv2d(x, self.weight, self.bias, stride=self.stride, padding=0, groups=self.groups)
        return conv2d(x, self.weight, self.bias, stride=self.stride, padding=self.padding, groups=self.groups)


class SpectralNormConv3d(Module):
    """3-D convolution whose weight is divided by its leading singular value.

    The singular vectors ``u``/``v`` persist as buffers. They start as the
    exact leading singular pair of the initial weight; in training mode
    each forward runs ``power_iterations`` updates first, in eval mode the
    stored vectors are used as is. Gradients treat ``u`` and ``v`` as
    constants.
    """

    def __init__(self, in_channels: int, out_channels: int, kernel_size: int, rng: SplitMix64,
                 stride=1, padding=1, power_iterations: int = 1):
        super().__init__()
        self.stride, self.padding, self.power_iterations = stride, padding, power_iterations
        fan_in = in_channels * kernel_size ** 3
        self.weight = init_uniform(rng, (out_channels, in_channels, kernel_size, kernel_size, kernel_size), fan_in)
        self.bias = zeros_param((out_channels,))
        left, _, right = np.linalg.svd(self.weight.data.reshape(out_channels, -1).astype(np.float64),
                                       full_matrices=False)
        self.register_buffer("u", left[:, 0].astype(get_default_dtype()))
        self.register_buffer("v", right[0].astype(get_default_dtype()))

    def power_iteration(self) -> None:
        w = self.weight.data.reshape(self.weight.shape[0], -1)
        for _ in range(self.power_iterations):
            v = w.T @ self.u
            v = v / max(np.linalg.norm(v), 1e-12)
            u = w @ v
            u = u / max(np.linalg.norm(u), 1e-12)
            self.u, self.v = u.astype(w.dtype), v.astype(w.dtype)

    def sigma(self) -> Array:
        w2d = self.weight.reshape(self.weight.shape[0], -1)
        outer = Array(np.outer(self.u, self.v), dtype=self.weight.dtype.type)
        return (w2d * outer).sum()

    def normalized_weight(self) -> Array:
        sigma = self.sigma()
        if abs(sigma.item()) < 1e-12:
            # all-zero weight: nothing to normalize
            return self.weight * 1.0
        return self.weight / sigma

    def forward(self, x: Array) -> Array:
        if self.training:
            self.power_iteration()
        return conv3d(x, self.normalized_weight(), self.bias, stride=self.stride, padding=self.padding)


class Conv3d(Module):
    """Plain 3-D convolution (used for the discriminator's score head)."""

    def __init__(self, in_channels: int, out_channels: int, kernel_size: int, rng: SplitMix64,
                 stride=1, padding=0):
        super().__init__()
        self.stride, self.padding = stride, padding
        fan_in = in_channels * kernel_size ** 3
        self.weight = init_uniform(rng, (out_channels, in_channels, kernel_size, kernel_size, kernel_size), fan_in)
        self.bias = zeros_param((out_channels,))

    def forward(self, x: Array) -> Array:
        return conv3d(x, self.weight, self.bias, stride=self.stride, padding=self.padding)


def freeze(module: Module) -> Module:
    """Stop gradient tracking for every parameter of ``module``."""
    for p in module.named_parameters().values():
        p.requires_grad = False
    return module
