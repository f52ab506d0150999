"""Gradient-check plugin suite.

Cases live in domain sub-packages (``checks/primitives``, ``checks/stgde``,
...) and are marked with ``@gradcheck``; ``CheckLoader`` discovers them and
``run_checks`` compares reverse-mode gradients with central differences.

Usage:
    from checks import run_checks

    results = run_checks(seeds=20)
    assert all(r.passed for r in results)
"""

from checks._decorators import COMPOSITE_ENTRIES, COMPOSITE_EPS, DEFAULT_EPS, get_check_metadata, gradcheck, is_check
from checks._loader import CheckLoader
from checks._registry import CheckRegistry
from checks.runner import (
    DEFAULT_DOMAINS,
    CheckResult,
    Contraction,
    GradCase,
    away_from_zero,
    case_error,
    load_registry,
    run_case,
    run_checks,
)

__all__ = [
    "COMPOSITE_ENTRIES",
    "COMPOSITE_EPS",
    "DEFAULT_EPS",
    "get_check_metadata",
    "gradcheck",
    "is_check",
    "CheckLoader",
    "CheckRegistry",
    "DEFAULT_DOMAINS",
    "CheckResult",
    "Contraction",
    "GradCase",
    "away_from_zero",
    "case_error",
    "load_registry",
    "run_case",
    "run_checks",
]
