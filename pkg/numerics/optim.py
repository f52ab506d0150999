"""Bias-corrected Adam with explicit, serializable state."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from numerics.array import Array
from utils.errors import ContractError

logger = logging.getLogger(__name__)


@dataclass
class AdamState:
    """Per-parameter moment accumulators plus the shared step counter."""

    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)
    step: int = 0

    @classmethod
    def for_params(cls, params: Mapping[str, Array]) -> "AdamState":
        state = cls()
        for name, p in params.items():
            state.m[name] = np.zeros_like(p.data)
            state.v[name] = np.zeros_like(p.data)
        return state


def adam_step(
    params: Mapping[str, Array],
    grads: Mapping[str, np.ndarray],
    state: AdamState,
    lr: float = 1e-4,
    beta1: float = 0.0,
    beta2: float = 0.99,
    eps: float = 1e-8,
) -> AdamState:
    """Apply one Adam update in place.

    Parameters without a gradient entry are left alone (their moments do
    not decay). Defaults follow the training recipe: lr 1e-4, betas (0, 0.99).

    Raises:
        ContractError: If a gradient or moment shape differs from its parameter
    """
    state.step += 1
    t = state.step
    bias1 = 1.0 - beta1 ** t
    bias2 = 1.0 - beta2 ** t
    for name, p in params.items():
        g = grads.get(name)
        if g is None:
            continue
        if g.shape != p.shape:
            raise ContractError(f"Gradient for {name} has shape {g.shape}, parameter {p.shape}")
        m = state.m.setdefault(name, np.zeros_like(p.data))
        v = state.v.setdefault(name, np.zeros_like(p.data))
        if m.shape != p.shape or v.shape != p.shape:
            raise ContractError(f"Adam moments for {name} do not match parameter shape {p.shape}")
        m *= beta1
        m += (1.0 - beta1) * g
        v *= beta2
        v += (1.0 - beta2) * g * g
        m_hat = m / bias1
        v_hat = v / bias2
        p.data -= (lr * m_hat / (np.sqrt(v_hat) + eps)).astype(p.data.dtype)
    logger.debug(f"adam step {t}: {len(grads)} gradients applied")
    return state


class Adam:
    """Convenience wrapper binding named parameters to an ``AdamState``."""

    def __init__(self, params: Mapping[str, Array], lr=1e-4, beta1=0.0, beta2=0.99, eps=1e-8):
        self.params = dict(params)
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.state = AdamState.for_params(self.params)

    def step(self, grads: Mapping[str, np.ndarray]) -> None:
        adam_step(self.params, grads, self.state, self.lr, self.beta1, self.beta2, self.eps)
