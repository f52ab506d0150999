"""Reconstruction, perceptual and style terms."""

import numpy as np

from checks._decorators import COMPOSITE_ENTRIES, COMPOSITE_EPS, gradcheck
from checks.runner import GradCase, away_from_zero
from losses import FixedFeatureBank, l1_loss, perceptual_loss, style_loss


@gradcheck(domain="losses", tags=["reconstruction"])
def l1_region(rng):
    target = rng.uniform((2, 4, 4, 3))
    pred = target + away_from_zero(rng, target.shape, 0.05, 0.5)
    region = (rng.uniform((2, 4, 4, 1)) > 0.5).astype(np.float64)
    region[0, 0, 0, 0] = 1.0
    return GradCase(lambda p: l1_loss(p, target, region), {"pred": pred})


@gradcheck(domain="losses", tags=["perceptual"], eps=COMPOSITE_EPS, tolerance=1e-4, entries=COMPOSITE_ENTRIES)
def perceptual(rng):
    bank = FixedFeatureBank(seed=int(rng.integers(0, 1 << 30)), channels=(4, 4, 4))
    target = rng.uniform((2, 8, 8, 3))
    return GradCase(lambda p: perceptual_loss(p, target, bank), {"pred": rng.uniform((2, 8, 8, 3))})


@gradcheck(domain="losses", tags=["style"], eps=COMPOSITE_EPS, tolerance=1e-4, entries=COMPOSITE_ENTRIES)
def style(rng):
    bank = FixedFeatureBank(seed=int(rng.integers(0, 1 << 30)), channels=(4, 4, 4))
    target = rng.uniform((2, 8, 8, 3))
    return GradCase(lambda p: style_loss(p, target, bank), {"pred": rng.uniform((2, 8, 8, 3))})
