"""Argument parsing for ``run_daevi.py``."""

import argparse

from utils.errors import UsageError

COMMANDS = ("synth", "train", "infer", "eval", "gradcheck")


class DaeviArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that raises ``UsageError`` (exit 1) instead of exiting with 2."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> DaeviArgumentParser:
    parser = DaeviArgumentParser(
        prog="daevi",
        description="Depth-aware video inpainting: synthesize data, train, inpaint, evaluate, check gradients.",
    )
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="warnings and errors only")
    parser.add_argument("--no-color", action="store_true", help="plain console output")

    sub = parser.add_subparsers(dest="command", required=True, parser_class=DaeviArgumentParser)

    synth = sub.add_parser("synth", help="write a synthetic dataset")
    _add_config(synth)
    synth.add_argument("--out", required=True, help="output directory")
    synth.add_argument("--ppm", action="store_true", help="also write PPM frames and PGM masks")

    train = sub.add_parser("train", help="train generator and discriminator")
    _add_config(train)
    train.add_argument("--data", help="dataset directory from `synth` (synthesized in memory when omitted)")
    train.add_argument("--out", required=True, help="run directory for checkpoints and the loss log")
    train.add_argument("--resume", help="checkpoint to continue from")

    infer = sub.add_parser("infer", help="inpaint a video window by window")
    _add_config(infer)
    infer.add_argument("--checkpoint", required=True)
    infer.add_argument("--clip", required=True, help="corrupted video container")
    infer.add_argument("--mask", required=True, help="mask container (0 = corrupted)")
    infer.add_argument("--out", required=True, help="inpainted video container")
    infer.add_argument("--mode", choices=("online", "offline"), help="reference sampling (default from config)")
    infer.add_argument("--timing", help="JSON lines file for per-window timing")

    evaluate = sub.add_parser("eval", help="crop metrics of a prediction")
    _add_config(evaluate)
    evaluate.add_argument("--pred", required=True)
    evaluate.add_argument("--truth", required=True)
    evaluate.add_argument("--mask", required=True)
    evaluate.add_argument("--pred-depth")
    evaluate.add_argument("--truth-depth")
    evaluate.add_argument("--out", help="JSON lines file (stdout when omitted)")

    gradcheck = sub.add_parser("gradcheck", help="compare gradients with finite differences")
    _add_config(gradcheck)
    gradcheck.add_argument("--seeds", type=int, default=20)
    gradcheck.add_argument("--domain", action="append",
                           help="domain to check, repeatable; 'all' for every domain (default: primitives)")
    gradcheck.add_argument("--out", help="JSON lines file (stdout when omitted)")
    return parser


def _add_config(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", default="default", help="config name from configs/ or a YAML path")
    parser.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                        help="dotted override, e.g. training.iterations=1 (repeatable)")
