"""Dense arrays with tape-based reverse-mode differentiation.

An ``Array`` wraps a numpy ndarray. Primitives (subclasses of
``Function``) compute on the raw data and, while a ``Tape`` is active,
append a node to it. ``backward`` replays the tape in reverse and
returns a gradient for every ``requires_grad`` leaf that took part.

Usage:
    x = Array(np.ones(3), requires_grad=True)
    with Tape() as tape:
        loss = (x * x).sum()
    grads = backward(loss, tape)
    grads[x]  # -> 2 * x
"""

from __future__ import annotations

import contextlib
import logging
from typing import Any, Iterator, Optional, Sequence

import numpy as np

from utils.errors import ContractError, NumericalError

logger = logging.getLogger(__name__)

_DTYPES = {"float32": np.float32, "float64": np.float64}
_default_dtype = np.float32
_finite_checks = True
_tape_stack: list["Tape"] = []


def set_default_dtype(dtype: str | type) -> None:
    """Select the precision used for new arrays and parameters."""
    global _default_dtype
    _default_dtype = _resolve_dtype(dtype)


def get_default_dtype() -> type:
    return _default_dtype


def _resolve_dtype(dtype: str | type) -> type:
    if isinstance(dtype, str):
        if dtype not in _DTYPES:
            raise ContractError(f"Unsupported precision: {dtype}")
        return _DTYPES[dtype]
    return np.dtype(dtype).type


@contextlib.contextmanager
def precision(dtype: str | type) -> Iterator[None]:
    """Temporarily switch the default precision (e.g. "float64" for gradient checks)."""
    previous = _default_dtype
    set_default_dtype(dtype)
    try:
        yield
    finally:
        set_default_dtype(previous)


def set_finite_checks(enabled: bool) -> None:
    """Enable or disable the NaN/Inf check run after every primitive."""
    global _finite_checks
    _finite_checks = bool(enabled)


def active_tape() -> Optional["Tape"]:
    return _tape_stack[-1] if _tape_stack else None


class Tape:
    """Ordered record of primitive applications.

    Only one writer may append to a tape. Tapes nest: the innermost
    active tape receives the nodes.
    """

    def __init__(self):
        self.nodes: list[Node] = []

    def __enter__(self) -> "Tape":
        _tape_stack.append(self)
        return self

    def __exit__(self, *exc) -> None:
        _tape_stack.remove(self)

    def record(self, node: "Node") -> None:
        self.nodes.append(node)

    def __len__(self) -> int:
        return len(self.nodes)

    def __repr__(self) -> str:
        return f"<Tape: {len(self.nodes)} nodes>"


class Node:
    """One primitive application: the function context, its inputs and output."""

    __slots__ = ("function", "inputs", "output")

    def __init__(self, function: "Function", inputs: Sequence["Array"], output: "Array"):
        self.function = function
        self.inputs = tuple(inputs)
        self.output = output


class Array:
    """Row-major dense array, optionally tracked for gradients.

    Args:
        data: Anything ``np.asarray`` accepts
        requires_grad: Whether gradients should be produced for this array
        dtype: Explicit dtype; defaults to the current default precision
    """

    __array_priority__ = 100

    def __init__(self, data: Any, requires_grad: bool = False, dtype: Optional[type] = None):
        if isinstance(data, Array):
            data = data.data
        target = dtype or _default_dtype
        arr = np.asarray(data)
        if arr.dtype != target:
            arr = arr.astype(target)
        self.data: np.ndarray = arr
        self.requires_grad = bool(requires_grad)
        self.grad: Optional[np.ndarray] = None
        self._node: Optional[Node] = None

    # -- inspection ---------------------------------------------------------

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def dtype(self):
        return self.data.dtype

    @property
    def T(self) -> "Array":
        return self.transpose()

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        if self.data.size != 1:
            raise ContractError(f"item() needs a single element, got shape {self.shape}")
        return float(self.data.reshape(()))

    def detach(self) -> "Array":
        return Array(self.data, requires_grad=False, dtype=self.data.dtype.type)

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self) -> str:
        flag = ", requires_grad=True" if self.requires_grad else ""
        return f"Array(shape={self.shape}, dtype={self.dtype}{flag})"

    def __len__(self) -> int:
        return self.shape[0]

    # -- operators (bound to primitives in numerics.ops) ---------------------

    def __add__(self, other):
        from numerics import ops
        return ops.add(self, other)

    def __radd__(self, other):
        from numerics import ops
        return ops.add(other, self)

    def __sub__(self, other):
        from numerics import ops
        return ops.sub(self, other)

    def __rsub__(self, other):
        from numerics import ops
        return ops.sub(other, self)

    def __mul__(self, other):
        from numerics import ops
        return ops.mul(self, other)

    def __rmul__(self, other):
        from numerics import ops
        return ops.mul(other, self)

    def __truediv__(self, other):
        from numerics import ops
        return ops.div(self, other)

    def __rtruediv__(self, other):
        from numerics import ops
        return ops.div(other, self)

    def __neg__(self):
        from numerics import ops
        return ops.neg(self)

    def __matmul__(self, other):
        from numerics import ops
        return ops.matmul(self, other)

    def __getitem__(self, index):
        from numerics import ops
        return ops.slice_(self, index)

    def sum(self, axis=None, keepdims: bool = False) -> "Array":
        from numerics import ops
        return ops.sum_(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims: bool = False) -> "Array":
        from numerics import ops
        return ops.mean(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape) -> "Array":
        from numerics import ops
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return ops.reshape(self, shape)

    def transpose(self, *axes) -> "Array":
        from numerics import ops
        if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
            axes = tuple(axes[0])
        return ops.transpose(self, axes or None)


def as_array(value: Any) -> Array:
    """Wrap constants; Arrays pass through untouched."""
    if isinstance(value, Array):
        return value
    return Array(value)


class Function:
    """Base class for differentiable primitives.

    Subclasses implement ``forward(self, *raw_inputs, **kwargs)`` returning
    an ndarray and ``backward(self, grad_output)`` returning one gradient
    (or None) per input. State needed for backward is stored on ``self``.
    """

    # Set on primitives that legitimately emit the -inf sentinel.
    allows_sentinel = False

    @classmethod
    def apply(cls, *inputs: Any, **kwargs: Any) -> Array:
        fn = cls()
        arrays = [as_array(x) for x in inputs]
        out_data = fn.forward(*[a.data for a in arrays], **kwargs)
        if _finite_checks and not cls.allows_sentinel and not np.all(np.isfinite(out_data)):
            raise NumericalError(f"Primitive {cls.__name__} produced non-finite values")
        dtype = arrays[0].data.dtype.type if arrays else _default_dtype
        out = Array(out_data, dtype=dtype)
        tape = active_tape()
        if tape is not None and any(a.requires_grad for a in arrays):
            out.requires_grad = True
            node = Node(fn, arrays, out)
            out._node = node
            tape.record(node)
        return out

    def forward(self, *args, **kwargs) -> np.ndarray:
        raise NotImplementedError

    def backward(self, grad_output: np.ndarray) -> tuple[Optional[np.ndarray], ...]:
        raise NotImplementedError


class GradientMap:
    """Gradients keyed by the leaf ``Array`` objects (identity based)."""

    def __init__(self):
        self._arrays: dict[int, Array] = {}
        self._grads: dict[int, np.ndarray] = {}

    def _put(self, array: Array, grad: np.ndarray) -> None:
        self._arrays[id(array)] = array
        self._grads[id(array)] = grad

    def __getitem__(self, array: Array) -> np.ndarray:
        return self._grads[id(array)]

    def get(self, array: Array, default=None):
        return self._grads.get(id(array), default)

    def __contains__(self, array) -> bool:
        return id(array) in self._grads

    def __len__(self) -> int:
        return len(self._grads)

    def __iter__(self):
        return iter(self._arrays.values())

    def items(self):
        return [(self._arrays[k], g) for k, g in self._grads.items()]


def backward(loss: Array, tape: Tape) -> GradientMap:
    """Reverse-mode sweep over ``tape`` starting at the scalar ``loss``.

    Args:
        loss: Scalar array produced while ``tape`` was recording
        tape: The tape holding the computation

    Returns:
        GradientMap with one entry per ``requires_grad`` leaf reached. The
        leaves' ``.grad`` attributes are also set (accumulating).

    Raises:
        ContractError: If ``loss`` is not scalar or not on the tape
    """
    if loss.size != 1:
        raise ContractError(f"backward needs a scalar loss, got shape {loss.shape}")
    if loss._node is not None:
        if not any(n is loss._node for n in reversed(tape.nodes)):
            raise ContractError("loss was not recorded on the given tape")
    elif not loss.requires_grad:
        raise ContractError("loss was not recorded on the given tape")

    grads: dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
    leaves: dict[int, Array] = {}
    if loss.requires_grad and loss._node is None:
        leaves[id(loss)] = loss

    for node in reversed(tape.nodes):
        g = grads.pop(id(node.output), None)
        if g is None:
            continue
        input_grads = node.function.backward(g)
        if not isinstance(input_grads, tuple):
            input_grads = (input_grads,)
        for inp, ig in zip(node.inputs, input_grads):
            if ig is None or not inp.requires_grad:
                continue
            ig = np.asarray(ig, dtype=inp.data.dtype)
            key = id(inp)
            if key in grads:
                grads[key] = grads[key] + ig
            else:
                grads[key] = ig
            if inp._node is None:
                leaves[key] = inp

    result = GradientMap()
    for key, leaf in leaves.items():
        g = grads.get(key)
        if g is None:
            g = np.zeros_like(leaf.data)
        leaf.grad = g if leaf.grad is None else leaf.grad + g
        result._put(leaf, g)
    logger.debug(f"backward: {len(tape.nodes)} nodes, {len(result)} leaves")
    return result
