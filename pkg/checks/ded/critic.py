"""Spectrally normalized critic and its hinge objective."""

from checks._decorators import COMPOSITE_ENTRIES, COMPOSITE_EPS, gradcheck
from checks.runner import GradCase, away_from_zero
from model.ded import Discriminator, discriminate, loss_ded, loss_gen


@gradcheck(domain="ded", tags=["critic"], eps=COMPOSITE_EPS, tolerance=1e-4, entries=COMPOSITE_ENTRIES)
def critic_scores(rng):
    """Scores of an RGB-D clip w.r.t. the clip and a normalized weight (u, v held fixed)."""
    critic = Discriminator(rng, in_channels=4, channels=(4, 4)).eval()
    inputs = {"clip": rng.uniform((2, 8, 8, 4)), "weight": critic.blocks[1].weight.data.copy()}

    def loss(x, w):
        critic.blocks[1].weight = w
        return discriminate(x, critic).sum()

    return GradCase(loss, inputs)


@gradcheck(domain="ded", tags=["hinge"])
def hinge_printed(rng):
    real = 1.0 + away_from_zero(rng, (4,), 0.1, 1.0)
    fake = away_from_zero(rng, (4,), 0.1, 1.0)
    return GradCase(lambda r, f: loss_ded(r, f, "printed") + loss_gen(f), {"real": real, "fake": fake})


@gradcheck(domain="ded", tags=["hinge"])
def hinge_standard(rng):
    real = 1.0 + away_from_zero(rng, (4,), 0.1, 1.0)
    fake = -1.0 + away_from_zero(rng, (4,), 0.1, 1.0)
    return GradCase(lambda r, f: loss_ded(r, f, "standard"), {"real": real, "fake": fake})
