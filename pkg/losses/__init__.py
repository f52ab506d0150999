"""Training objectives.

The hinge terms live next to the discriminator and are re-exported here.
"""

from losses.objective import LossWeights, total_generator_loss
from losses.perceptual import BANK_SEED, FixedFeatureBank, gram_matrix, perceptual_loss, style_loss
from losses.reconstruction import EmptyRegionWarning, l1_loss
from model.ded import loss_ded, loss_gen

__all__ = [
    "LossWeights",
    "total_generator_loss",
    "BANK_SEED",
    "FixedFeatureBank",
    "gram_matrix",
    "perceptual_loss",
    "style_loss",
    "EmptyRegionWarning",
    "l1_loss",
    "loss_ded",
    "loss_gen",
]
