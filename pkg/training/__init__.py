"""Run configuration, training loop, checkpoints and windowed inference."""

from training.batching import Batch, frame_indices, sample_batch
from training.checkpoint import decode_checkpoint, encode_checkpoint, load_checkpoint, save_checkpoint
from training.config import RunConfig, apply_override, list_available_configs
from training.inference import (
    WindowTiming,
    infer_window,
    reference_candidates,
    run_window,
    sample_references,
    window_starts,
)
from training.trainer import (
    LossReport,
    Trainer,
    build_discriminator,
    build_generator,
    critic_input,
    discriminator_step,
    train_step,
)

__all__ = [
    "Batch",
    "frame_indices",
    "sample_batch",
    "decode_checkpoint",
    "encode_checkpoint",
    "load_checkpoint",
    "save_checkpoint",
    "RunConfig",
    "apply_override",
    "list_available_configs",
    "WindowTiming",
    "infer_window",
    "reference_candidates",
    "run_window",
    "sample_references",
    "window_starts",
    "LossReport",
    "Trainer",
    "build_discriminator",
    "build_generator",
    "critic_input",
    "discriminator_step",
    "train_step",
]
