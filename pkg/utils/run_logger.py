"""Colored console presentation for CLI runs.

Human-facing summaries only: banners, the resolved configuration, loss,
metric and gradient-check tables. Machine-readable records are written
separately as JSON lines.
"""

import logging
import sys
from datetime import datetime
from typing import Any, Dict, Iterable, List, Optional

from colorama import Fore, Style, just_fix_windows_console

logger = logging.getLogger(__name__)

just_fix_windows_console()

WIDTH = 80


class RunLogger:
    """Static presenter writing to ``RunLogger.stream`` (stderr by default)."""

    stream = sys.stderr
    color = True

    @staticmethod
    def _colorize(text: str, color: str, bold: bool = False) -> str:
        if not RunLogger.color:
            return text
        prefix = Style.BRIGHT if bold else ""
        return f"{prefix}{color}{text}{Style.RESET_ALL}"

    @staticmethod
    def _print(text: str = "") -> None:
        print(text, file=RunLogger.stream)

    @staticmethod
    def print_header(command: str):
        RunLogger._print("\n" + "=" * WIDTH)
        RunLogger._print(RunLogger._colorize(f"daevi {command}".center(WIDTH), Fore.BLUE, bold=True))
        timestamp = datetime.now().strftime("%Y-%m-%d %H:%M:%S")
        RunLogger._print(RunLogger._colorize(timestamp.center(WIDTH), Fore.LIGHTBLACK_EX))
        RunLogger._print("=" * WIDTH + "\n")

    @staticmethod
    def print_section(title: str):
        RunLogger._print(RunLogger._colorize(title, Fore.CYAN, bold=True))
        RunLogger._print(RunLogger._colorize("-" * WIDTH, Fore.LIGHTBLACK_EX))

    @staticmethod
    def print_config(config_json: str, config_hash: Optional[str] = None):
        """Print the resolved configuration as JSON (re-parsable as is)."""
        RunLogger.print_section("Resolved configuration")
        RunLogger._print(config_json)
        if config_hash:
            RunLogger._print(RunLogger._colorize(f"architecture hash {config_hash[:16]}", Fore.LIGHTBLACK_EX))
        RunLogger._print()

    @staticmethod
    def print_loss_row(record: Dict[str, Any]):
        terms = "  ".join(
            f"{key}={RunLogger._colorize(f'{record[key]:.5f}', Fore.WHITE)}"
            for key in ("l_d", "l_i", "l_p", "l_s", "l_gen", "l_ded")
        )
        total = RunLogger._colorize(f"{record['total']:.5f}", Fore.GREEN, bold=True)
        RunLogger._print(f"  iter {record['iteration']:>6}  {terms}  total={total}")

    @staticmethod
    def print_metrics_table(rows: List[Dict[str, Any]]):
        RunLogger.print_section("Crop metrics")
        has_depth = any("depth_rmse" in row for row in rows)
        header = f"  {'clip':<20}{'PSNR':>10}{'SSIM':>10}{'MSE':>12}"
        if has_depth:
            header += f"{'depth RMSE':>12}"
        RunLogger._print(RunLogger._colorize(header, Fore.BLUE, bold=True))
        for row in rows:
            line = f"  {row['clip']:<20}{row['psnr_crop']:>10.3f}{row['ssim_crop']:>10.4f}{row['mse_crop']:>12.3f}"
            if has_depth:
                line += f"{row.get('depth_rmse', float('nan')):>12.4f}"
            RunLogger._print(line)
        RunLogger._print()

    @staticmethod
    def print_gradcheck_table(records: Iterable[Dict[str, Any]]):
        RunLogger.print_section("Gradient checks")
        by_domain: Dict[str, List[Dict[str, Any]]] = {}
        for record in records:
            by_domain.setdefault(record["domain"], []).append(record)
        for domain, items in sorted(by_domain.items()):
            failed = sum(not r["passed"] for r in items)
            count = RunLogger._colorize(f"({len(items)} cases)", Fore.GREEN if not failed else Fore.RED)
            RunLogger._print(f"  {RunLogger._colorize(domain, Fore.BLUE, bold=True)} {count}")
            for r in items:
                status = RunLogger._colorize("ok", Fore.GREEN) if r["passed"] else RunLogger._colorize("FAIL", Fore.RED, bold=True)
                name = r["case"].split(".", 1)[-1]
                RunLogger._print(f"     {status:<4} {name:<32} max rel err {r['max_rel_error']:.3e}")
            RunLogger._print()

    @staticmethod
    def print_warnings(warnings: List[str]):
        if not warnings:
            return
        RunLogger.print_section("Warnings")
        for warning in warnings:
            RunLogger._print(f"  ! {RunLogger._colorize(warning, Fore.YELLOW)}")
        RunLogger._print()

    @staticmethod
    def print_footer(ok: bool, artifacts: Optional[List[str]] = None):
        RunLogger._print("=" * WIDTH)
        if ok:
            status = RunLogger._colorize("DONE", Fore.GREEN, bold=True)
        else:
            status = RunLogger._colorize("FAILED", Fore.RED, bold=True)
        RunLogger._print(f"\n  {status}")
        for path in artifacts or []:
            RunLogger._print(f"  -> {RunLogger._colorize(str(path), Fore.CYAN)}")
        RunLogger._print("\n" + "=" * WIDTH + "\n")

    @staticmethod
    def print_error(message: str, exit_code: int):
        RunLogger._print(RunLogger._colorize(f"error (exit {exit_code}): {message}", Fore.RED, bold=True))
