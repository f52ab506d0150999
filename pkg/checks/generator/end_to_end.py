"""The full weighted generator objective on a 2-frame 8x8 micro-model.

Every term takes part: depth and image reconstruction, perceptual and
style terms on a small frozen bank, and the adversarial term through an
eval-mode critic on the RGB-D output.
"""

import numpy as np

from checks._decorators import COMPOSITE_ENTRIES, COMPOSITE_EPS, gradcheck
from checks.runner import GradCase
from losses import FixedFeatureBank, LossWeights, l1_loss, perceptual_loss, style_loss, total_generator_loss
from model.ded import Discriminator, discriminate, loss_gen, make_rgbd
from model.generator import Generator
from model.stgde import PatchGrid


@gradcheck(domain="generator", tags=["end_to_end"], eps=COMPOSITE_EPS, tolerance=1e-4, entries=COMPOSITE_ENTRIES)
def full_objective(rng):
    generator = Generator(rng, base_channels=2, num_blocks=2, grid=PatchGrid(2, 2), ffn_expansion=2)
    critic = Discriminator(rng, in_channels=4, channels=(4, 4)).eval()
    bank = FixedFeatureBank(seed=int(rng.integers(0, 1 << 30)), channels=(4, 4, 4))
    weights = LossWeights()
    target = rng.uniform((2, 8, 8, 3))
    depth = rng.uniform((2, 8, 8, 1), 0.1, 0.9)
    masks = (rng.uniform((2, 8, 8, 1)) > 0.3).astype(np.float64)
    masks[0, 0, 0, 0] = 1.0
    inputs = {"frames": rng.uniform((2, 8, 8, 3)), "fusion_weight": generator.bmpcf.fusion.weight.data.copy()}

    def loss(frames, w):
        generator.bmpcf.fusion.weight = w
        frames_hat, d_hat = generator(frames, masks)
        l_gen = loss_gen(discriminate(make_rgbd(frames_hat, d_hat), critic))
        return total_generator_loss(
            l1_loss(d_hat, depth),
            l1_loss(frames_hat, target),
            l_gen,
            perceptual_loss(frames_hat, target, bank),
            style_loss(frames_hat, target, bank),
            weights,
        )

    return GradCase(loss, inputs)
