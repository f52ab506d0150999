"""L1 reconstruction terms (L_D on depth, L_I on frames)."""

from __future__ import annotations

import logging
import warnings
from typing import Optional

import numpy as np

from numerics import Array, as_array, ops
from utils.errors import ContractError

logger = logging.getLogger(__name__)


class EmptyRegionWarning(UserWarning):
    """Raised through ``warnings`` when an L1 region mask selects nothing."""


def l1_loss(pred: Array, target, region_mask: Optional[np.ndarray] = None) -> Array:
    """Mean absolute error, optionally over a 0/1 weighted region.

    Args:
        pred: Prediction (differentiable)
        target: Reference of the same shape
        region_mask: Optional weights broadcastable to ``pred``

    Returns:
        Scalar array; an empty region yields 0 and an ``EmptyRegionWarning``

    Raises:
        ContractError: If shapes differ
    """
    pred, target = as_array(pred), as_array(target)
    if pred.shape != target.shape:
        raise ContractError(f"l1_loss shapes differ: {pred.shape} vs {target.shape}")
    diff = ops.abs_(pred - target)
    if region_mask is None:
        return diff.mean()
    weights = np.broadcast_to(np.asarray(region_mask, dtype=np.float64), pred.shape)
    count = float(weights.sum())
    if count == 0.0:
        logger.warning("l1_loss region is empty; returning 0")
        warnings.warn("l1_loss region mask selects no elements", EmptyRegionWarning, stacklevel=2)
        return (diff * 0.0).sum()
    return (diff * Array(weights, dtype=pred.dtype.type)).sum() / count
