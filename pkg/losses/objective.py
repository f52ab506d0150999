"""Weighted generator objective L = l_D L_D + l_I L_I + l_GEN L_GEN + l_P L_P + l_S L_S."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass

from numerics import Array
from utils.errors import ConfigurationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LossWeights:
    """Per-term weights; defaults are the published training recipe."""

    lambda_d: float = 0.1
    lambda_p: float = 0.1
    lambda_s: float = 250.0
    lambda_i: float = 1.0
    lambda_gen: float = 0.01

    def __post_init__(self):
        for name, value in asdict(self).items():
            if value < 0:
                raise ConfigurationError(f"Loss weight {name} must be >= 0, got {value}")


def total_generator_loss(l_d, l_i, l_gen, l_p, l_s, w: LossWeights = LossWeights()):
    """Exact weighted sum; works on plain floats and on ``Array`` scalars alike."""
    terms = (
        (w.lambda_d, l_d),
        (w.lambda_i, l_i),
        (w.lambda_gen, l_gen),
        (w.lambda_p, l_p),
        (w.lambda_s, l_s),
    )
    total = None
    for weight, value in terms:
        term = value * weight if isinstance(value, Array) else float(value) * weight
        total = term if total is None else total + term
    return total
