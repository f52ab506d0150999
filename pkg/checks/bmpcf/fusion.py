"""Depth encoding, channel interleaving and group-wise fusion."""

from checks._decorators import COMPOSITE_ENTRIES, COMPOSITE_EPS, gradcheck
from checks.runner import Contraction, GradCase
from model.bmpcf import BMPCF


def _fusion_case(rng, mode: str) -> GradCase:
    fusion = BMPCF(base_channels=2, rng=rng, mode=mode)
    inputs = {
        "visual": rng.normal((2, 8, 2, 2)),
        "d_hat": rng.uniform((2, 8, 8, 1), 0.1, 0.9),
        "fusion_weight": fusion.fusion.weight.data.copy(),
    }
    c = Contraction(rng)

    def loss(visual, d_hat, w):
        fusion.fusion.weight = w
        return c(fusion(visual, d_hat))

    return GradCase(loss, inputs)


@gradcheck(domain="bmpcf", tags=["fusion"], eps=COMPOSITE_EPS, tolerance=1e-4, entries=COMPOSITE_ENTRIES)
def paired_fusion(rng):
    return _fusion_case(rng, "paired")


@gradcheck(domain="bmpcf", tags=["fusion"], eps=COMPOSITE_EPS, tolerance=1e-4, entries=COMPOSITE_ENTRIES)
def concat_fusion(rng):
    return _fusion_case(rng, "concat")
