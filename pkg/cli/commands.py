"""Subcommand implementations.

Each command returns the list of artifacts it wrote; errors propagate as
``DaeviError`` subclasses and are mapped to exit codes by ``cli.main``.
"""

from __future__ import annotations

import logging
from pathlib import Path

from checks import DEFAULT_DOMAINS, run_checks
from cli.records import open_records
from data import build_dataset, crop_metrics, depth_rmse, load_dataset, read_clip, save_dataset, write_clip
from numerics import precision
from training import RunConfig, Trainer, infer_window
from utils.errors import NumericalError
from utils.run_logger import RunLogger

logger = logging.getLogger(__name__)

LOSS_LOG = "losses.jsonl"
FINAL_CHECKPOINT = "final.dvck"


def load_config(args) -> RunConfig:
    """Resolve ``--config``/``--override`` and print the result before any work."""
    config = RunConfig.load(args.config, args.override)
    RunLogger.print_config(config.to_json(), config.config_hash())
    return config


def cmd_synth(args) -> list[str]:
    config = load_config(args)
    samples = build_dataset(config)
    written = save_dataset(args.out, samples, ppm=args.ppm)
    return [str(p) for p in written]


def cmd_train(args) -> list[str]:
    config = load_config(args)
    dataset = load_dataset(args.data) if args.data else build_dataset(config)
    trainer = Trainer.load(args.resume, config) if args.resume else Trainer(config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    remaining = max(0, config.training.iterations - trainer.iteration)
    if args.resume:
        logger.info(f"Resuming at iteration {trainer.iteration}, {remaining} to go")

    artifacts = [str(out / LOSS_LOG)]
    every = config.training.checkpoint_every
    log_every = config.training.log_every
    with open_records(out / LOSS_LOG) as records:

        def on_step(iteration, report):
            record = report.to_record(iteration)
            records.write(record)
            if log_every and iteration % log_every == 0:
                RunLogger.print_loss_row(record)
            if every and (iteration + 1) % every == 0:
                artifacts.append(str(trainer.save(out / f"checkpoint_{iteration + 1:06d}.dvck")))

        trainer.fit(dataset, iterations=remaining, on_step=on_step)
    artifacts.append(str(trainer.save(out / FINAL_CHECKPOINT)))
    return artifacts


def cmd_infer(args) -> list[str]:
    config = load_config(args)
    trainer = Trainer.load(args.checkpoint, config)
    frames = read_clip(args.clip)
    masks = read_clip(args.mask)
    settings = config.inference
    mode = args.mode or settings.mode
    timings = []
    with precision(config.training.precision):
        output = infer_window(trainer.generator, frames, masks, mode=mode, window=settings.window,
                              references=settings.references, radius=settings.radius,
                              seed=config.seed, timings=timings)
    artifacts = [str(write_clip(args.out, output))]
    if args.timing:
        with open_records(args.timing) as records:
            for timing in timings:
                records.write(timing.to_record())
        artifacts.append(args.timing)
    return artifacts


def cmd_eval(args) -> list[str]:
    load_config(args)
    pred = read_clip(args.pred)
    truth = read_clip(args.truth)
    mask = read_clip(args.mask)
    record = {"clip": Path(args.pred).stem, **crop_metrics(pred, truth, mask)}
    if args.pred_depth and args.truth_depth:
        record["depth_rmse"] = depth_rmse(read_clip(args.pred_depth), read_clip(args.truth_depth), mask)
    elif args.pred_depth or args.truth_depth:
        RunLogger.print_warnings(["depth RMSE needs both --pred-depth and --truth-depth; skipped"])
    RunLogger.print_metrics_table([record])
    with open_records(args.out) as records:
        records.write(record)
    return [args.out] if args.out else []


def cmd_gradcheck(args) -> list[str]:
    load_config(args)
    domains = args.domain or list(DEFAULT_DOMAINS)
    if "all" in domains:
        domains = None
    results = run_checks(seeds=args.seeds, domains=domains)
    records_out = [r.to_record() for r in results]
    RunLogger.print_gradcheck_table(records_out)
    with open_records(args.out) as records:
        for record in records_out:
            records.write(record)
    failed = [r.case_id for r in results if not r.passed]
    if failed:
        raise NumericalError(f"{len(failed)} gradient check(s) failed: {', '.join(failed)}")
    return [args.out] if args.out else []


COMMANDS = {
    "synth": cmd_synth,
    "train": cmd_train,
    "infer": cmd_infer,
    "eval": cmd_eval,
    "gradcheck": cmd_gradcheck,
}
