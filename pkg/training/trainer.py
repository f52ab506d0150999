"""Alternating discriminator / generator optimization.

Each iteration first updates the discriminator on the hinge objective with
the generator output detached, then updates the generator on the weighted
objective (reconstruction, perceptual, style and adversarial terms).
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import Callable, Optional

import numpy as np

from losses import FixedFeatureBank, LossWeights, l1_loss, loss_ded, loss_gen, perceptual_loss, style_loss
from losses.objective import total_generator_loss
from model import Discriminator, Generator, PatchGrid, discriminate, make_rgbd
from numerics import AdamState, Array, Module, SplitMix64, Tape, adam_step, backward, precision
from training.batching import Batch, sample_batch
from training.checkpoint import load_checkpoint, save_checkpoint
from utils.errors import DataError, NumericalError

logger = logging.getLogger(__name__)

GENERATOR_STREAM = 101
DISCRIMINATOR_STREAM = 102


@dataclass
class LossReport:
    """Every term of one iteration; ``total`` is the weighted generator objective."""

    l_d: float
    l_i: float
    l_p: float
    l_s: float
    l_gen: float
    l_ded: float
    total: float

    def weighted_terms(self, weights: LossWeights) -> dict[str, float]:
        return {
            "l_d": weights.lambda_d * self.l_d,
            "l_i": weights.lambda_i * self.l_i,
            "l_gen": weights.lambda_gen * self.l_gen,
            "l_p": weights.lambda_p * self.l_p,
            "l_s": weights.lambda_s * self.l_s,
        }

    def to_record(self, iteration: int) -> dict:
        return {"iteration": iteration, **asdict(self)}


def build_generator(config, rng: Optional[SplitMix64] = None) -> Generator:
    m = config.model
    rng = rng or SplitMix64.derive(config.seed, GENERATOR_STREAM)
    return Generator(rng, base_channels=m.base_channels, num_blocks=m.num_blocks,
                     grid=PatchGrid(m.patch_rows, m.patch_cols), mask_rule=m.mask_rule,
                     depth_blocks=m.depth_blocks, fusion=m.fusion, fusion_kernel=m.fusion_kernel,
                     ffn_expansion=m.ffn_expansion)


def build_discriminator(config, rng: Optional[SplitMix64] = None) -> Discriminator:
    d = config.discriminator
    rng = rng or SplitMix64.derive(config.seed, DISCRIMINATOR_STREAM)
    in_channels = 4 if d.input == "rgbd" else 3
    return Discriminator(rng, in_channels=in_channels, channels=d.channels, power_iterations=d.power_iterations)


def critic_input(frames, depth, mode: str) -> Array:
    frames = frames if isinstance(frames, Array) else Array(frames)
    if mode == "rgb":
        return frames
    depth = depth if isinstance(depth, Array) else Array(depth)
    return make_rgbd(frames, depth)


def _named_grads(params: dict[str, Array], grads) -> dict[str, np.ndarray]:
    named = {name: grads[p] for name, p in params.items() if p in grads}
    for p in params.values():
        p.zero_grad()
    return named


def _term(name: str, compute: Callable[[], Array]) -> Array:
    """Evaluate one loss term; a non-finite value aborts naming the term."""
    try:
        value = compute()
    except NumericalError as e:
        raise NumericalError(f"Loss term {name} is not finite: {e}") from e
    if not math.isfinite(value.item()):
        raise NumericalError(f"Loss term {name} is not finite ({value.item()})")
    return value


def discriminator_step(discriminator: Discriminator, state: AdamState, real: Array, fake: Array,
                       config) -> float:
    """One Adam step of the critic on fixed real/fake inputs; returns L_DED before the step."""
    o = config.optim
    params = discriminator.named_parameters()
    with Tape() as tape:
        l_ded = _term("l_ded", lambda: loss_ded(discriminate(real, discriminator),
                                                discriminate(fake, discriminator),
                                                hinge=config.discriminator.hinge))
    grads = _named_grads(params, backward(l_ded, tape))
    adam_step(params, grads, state, o.lr, o.beta1, o.beta2, o.eps)
    return l_ded.item()


def train_step(batch: Batch, generator: Generator, discriminator: Discriminator, gen_state: AdamState,
               disc_state: AdamState, config, bank: FixedFeatureBank) -> LossReport:
    """One iteration: critic update on detached fakes, then generator update.

    Raises:
        NumericalError: Naming the first loss term that is not finite
    """
    frames = Array(batch.frames)
    depth_truth = Array(batch.depth)
    mode = config.discriminator.input
    weights = config.losses.weights()
    gen_params = generator.named_parameters()

    with Tape() as tape:
        frames_hat, depth_hat = generator(frames, batch.masks)
        l_d = _term("l_d", lambda: l1_loss(depth_hat, depth_truth))
        l_i = _term("l_i", lambda: l1_loss(frames_hat, frames))
        l_p = _term("l_p", lambda: perceptual_loss(frames_hat, frames, bank))
        l_s = _term("l_s", lambda: style_loss(frames_hat, frames, bank))

    real = critic_input(frames, depth_truth, mode)
    fake = critic_input(frames_hat.detach(), depth_hat.detach(), mode)
    discriminator.train()
    l_ded = discriminator_step(discriminator, disc_state, real, fake, config)

    # critic scores for the generator reuse the singular vectors of the critic step
    discriminator.eval()
    with tape:
        l_gen = _term("l_gen", lambda: loss_gen(discriminate(critic_input(frames_hat, depth_hat, mode),
                                                             discriminator)))
        total = _term("total", lambda: total_generator_loss(l_d, l_i, l_gen, l_p, l_s, weights))
    discriminator.train()

    grads = _named_grads(gen_params, backward(total, tape))
    o = config.optim
    adam_step(gen_params, grads, gen_state, o.lr, o.beta1, o.beta2, o.eps)
    for p in discriminator.named_parameters().values():
        p.zero_grad()

    return LossReport(l_d=l_d.item(), l_i=l_i.item(), l_p=l_p.item(), l_s=l_s.item(),
                      l_gen=l_gen.item(), l_ded=l_ded, total=total.item())


class Trainer:
    """Owns both networks, their optimizer states and the iteration counter.

    Example:
        trainer = Trainer(RunConfig.load("micro"))
        reports = trainer.fit(build_dataset(trainer.config), iterations=10)
        trainer.save("runs/micro.dvck")
    """

    def __init__(self, config):
        self.config = config
        self.dtype = config.training.precision
        with precision(self.dtype):
            self.generator = build_generator(config)
            self.discriminator = build_discriminator(config)
            self.bank = FixedFeatureBank(config.losses.bank_seed)
        self.gen_state = AdamState.for_params(self.generator.named_parameters())
        self.disc_state = AdamState.for_params(self.discriminator.named_parameters())
        self.iteration = 0
        logger.info(
            f"Trainer ready: generator {self.generator.parameter_count()} params, "
            f"discriminator {self.discriminator.parameter_count()} params, precision {self.dtype}"
        )

    def step(self, batch: Batch) -> LossReport:
        with precision(self.dtype):
            report = train_step(batch, self.generator, self.discriminator, self.gen_state,
                                self.disc_state, self.config, self.bank)
        self.iteration += 1
        return report

    def fit(self, dataset, iterations: Optional[int] = None,
            on_step: Optional[Callable[[int, LossReport], None]] = None) -> list[LossReport]:
        """Run ``iterations`` steps (default ``training.iterations``) continuing from the current iteration."""
        if not dataset:
            raise DataError("Training needs at least one clip")
        iterations = self.config.training.iterations if iterations is None else iterations
        reports = []
        for _ in range(iterations):
            batch = sample_batch(dataset, self.iteration, self.config)
            it = self.iteration
            report = self.step(batch)
            reports.append(report)
            if on_step is not None:
                on_step(it, report)
            log_every = self.config.training.log_every
            if log_every and it % log_every == 0:
                logger.info(f"iter {it}: total={report.total:.5f} l_i={report.l_i:.5f} l_ded={report.l_ded:.5f}")
        return reports

    def modules(self) -> dict[str, Module]:
        return {"G": self.generator, "D": self.discriminator}

    def save(self, path):
        return save_checkpoint(path, self)

    @classmethod
    def load(cls, path, config) -> "Trainer":
        trainer = cls(config)
        load_checkpoint(path, trainer)
        return trainer
