"""Command-line surface: ``synth``, ``train``, ``infer``, ``eval`` and ``gradcheck``."""

from cli.commands import COMMANDS, load_config
from cli.main import configure_logging, main
from cli.parser import build_parser
from cli.records import RecordWriter, open_records, read_records

__all__ = [
    "COMMANDS",
    "load_config",
    "configure_logging",
    "main",
    "build_parser",
    "RecordWriter",
    "open_records",
    "read_records",
]
