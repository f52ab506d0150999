"""Central-difference gradient oracle.

``f`` must be deterministic: a function that draws fresh randomness per
call gives meaningless estimates.
"""

from __future__ import annotations

from typing import Callable, Optional, Sequence

import numpy as np

from numerics.array import Array


def finite_diff_grad(f: Callable[[Array], Array | float], x: Array, eps: float = 1e-4,
                     indices: Optional[Sequence[int]] = None) -> Array:
    """Estimate df/dx element by element with central differences.

    Args:
        f: Scalar-valued function of one array
        x: Point of evaluation (left untouched)
        eps: Perturbation size, 1e-4 by default (64-bit)
        indices: Flat indices to difference; every other entry stays 0.
            All entries when omitted.

    Returns:
        Array shaped like ``x`` holding (f(x + eps e) - f(x - eps e)) / (2 eps)
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    base = np.array(x.data, copy=True)
    flat = base.reshape(-1)
    out = np.zeros(flat.shape, dtype=np.float64)
    for i in range(flat.size) if indices is None else indices:
        original = flat[i]
        flat[i] = original + eps
        f_plus = _scalar(f(Array(base, dtype=base.dtype.type)))
        flat[i] = original - eps
        f_minus = _scalar(f(Array(base, dtype=base.dtype.type)))
        flat[i] = original
        out[i] = (f_plus - f_minus) / (2.0 * eps)
    return Array(out.reshape(x.shape), dtype=x.dtype.type)


def relative_error(analytic: np.ndarray, numeric: np.ndarray, floor: float = 1e-8) -> float:
    """max|a - n| scaled by the largest gradient magnitude (never below ``floor``)."""
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    scale = max(float(np.max(np.abs(analytic), initial=0.0)),
                float(np.max(np.abs(numeric), initial=0.0)), floor)
    return float(np.max(np.abs(analytic - numeric), initial=0.0)) / scale


def _scalar(value) -> float:
    if isinstance(value, Array):
        return value.item()
    return float(value)
