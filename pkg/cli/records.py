"""JSON lines output."""

import contextlib
import json
import logging
import sys
from pathlib import Path
from typing import Iterator, Optional, TextIO

logger = logging.getLogger(__name__)


class RecordWriter:
    """Writes one JSON object per line and flushes after each record."""

    def __init__(self, stream: TextIO):
        self.stream = stream
        self.count = 0

    def write(self, record: dict) -> None:
        self.stream.write(json.dumps(record, sort_keys=False) + "\n")
        self.stream.flush()
        self.count += 1


@contextlib.contextmanager
def open_records(path: Optional[str | Path]) -> Iterator[RecordWriter]:
    """Records go to ``path`` or, when it is ``None``, to stdout."""
    if path is None:
        yield RecordWriter(sys.stdout)
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        writer = RecordWriter(f)
        yield writer
    logger.info(f"Wrote {writer.count} records to {path}")


def read_records(path: str | Path) -> list[dict]:
    with open(path) as f:
        return [json.loads(line) for line in f if line.strip()]
