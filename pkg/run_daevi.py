#!/usr/bin/env python3
"""Run one DAEVI subcommand, e.g. ``python run_daevi.py train --config micro --out runs/micro``."""

import sys

from cli import main

if __name__ == "__main__":
    sys.exit(main())
