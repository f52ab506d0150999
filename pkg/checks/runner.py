"""Compare reverse-mode gradients with central differences.

Every case runs in 64-bit precision: the factory builds its inputs (and any
module parameters) from a per-seed stream, the engine computes gradients
for all case inputs in one backward pass, and each input is then perturbed
element by element. Composite cases set ``entries`` and are differenced on
a seeded sample of coordinates instead.
"""

from __future__ import annotations

import logging
import zlib
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np

from checks._registry import CheckRegistry
from numerics import Array, SplitMix64, Tape, backward, finite_diff_grad, precision, relative_error
from utils.errors import ConfigurationError

logger = logging.getLogger(__name__)

DEFAULT_DOMAINS = ("primitives",)
ENTRY_STREAM = 1


@dataclass
class GradCase:
    """A scalar function of named inputs.

    ``loss`` receives one ``Array`` per entry of ``inputs``, in insertion
    order, and must not draw randomness.
    """

    loss: Callable[..., Array]
    inputs: dict[str, np.ndarray] = field(default_factory=dict)


@dataclass
class CheckResult:
    case_id: str
    passed: bool
    max_rel_error: float
    seeds: int
    domain: str = ""
    worst_input: str = ""

    def to_record(self) -> dict:
        return {
            "case": self.case_id,
            "domain": self.domain,
            "passed": self.passed,
            "max_rel_error": self.max_rel_error,
            "seeds": self.seeds,
        }


class Contraction:
    """Scalar ``sum(out * w)`` with random weights drawn once per output shape.

    The weights are cached, so repeated evaluations during finite
    differencing see the same function.
    """

    def __init__(self, rng: SplitMix64):
        self.rng = rng
        self._weights: dict[tuple[int, ...], np.ndarray] = {}

    def __call__(self, out: Array) -> Array:
        weights = self._weights.get(out.shape)
        if weights is None:
            weights = self._weights[out.shape] = self.rng.uniform(out.shape, -1.0, 1.0)
        return (out * Array(weights, dtype=out.dtype.type)).sum()


def away_from_zero(rng: SplitMix64, shape: tuple[int, ...], low: float = 0.1, high: float = 1.0) -> np.ndarray:
    """Values with |x| in [low, high] and random sign, for cases through kinks."""
    magnitude = rng.uniform(shape, low, high)
    sign = np.where(rng.uniform(shape) < 0.5, -1.0, 1.0)
    return magnitude * sign


def case_error(grad_case: GradCase, eps: float, entries: Optional[int] = None,
               picker: Optional[SplitMix64] = None) -> tuple[float, str]:
    """Worst relative error over all case inputs and the input it occurred on.

    With ``entries`` set, inputs larger than that are differenced on a
    sample of ``entries`` coordinates drawn from ``picker``.
    """
    leaves = [Array(value, requires_grad=True) for value in grad_case.inputs.values()]
    with Tape() as tape:
        loss = grad_case.loss(*leaves)
    grads = backward(loss, tape)
    picker = picker or SplitMix64(0)

    worst, worst_name = 0.0, ""
    for i, name in enumerate(grad_case.inputs):
        analytic = grads.get(leaves[i])
        if analytic is None:
            analytic = np.zeros(leaves[i].shape)

        def f(x: Array, i: int = i) -> Array:
            args = list(leaves)
            args[i] = x
            return grad_case.loss(*args)

        indices = None
        if entries is not None and leaves[i].size > entries:
            indices = picker.sample_without_replacement(leaves[i].size, entries)
        numeric = finite_diff_grad(f, leaves[i], eps, indices).data
        if indices is not None:
            analytic, numeric = np.ravel(analytic)[indices], numeric.ravel()[indices]
        error = relative_error(analytic, numeric)
        if error > worst or not worst_name:
            worst, worst_name = error, name
    return worst, worst_name


def case_stream(case_id: str, seed: int, purpose: int = 0) -> SplitMix64:
    return SplitMix64.derive(seed, zlib.crc32(case_id.encode("utf-8")), purpose)


def run_case(case_id: str, check: dict, seeds: int = 20) -> CheckResult:
    metadata = check["metadata"]
    worst, worst_name = 0.0, ""
    with precision("float64"):
        for seed in range(seeds):
            grad_case = check["factory"](case_stream(case_id, seed))
            error, name = case_error(grad_case, metadata["eps"], metadata.get("entries"),
                                    case_stream(case_id, seed, ENTRY_STREAM))
            if error >= worst:
                worst, worst_name = error, name
    passed = worst <= metadata["tolerance"]
    log = logger.info if passed else logger.warning
    log(f"{case_id}: max relative error {worst:.3e} over {seeds} seeds ({'ok' if passed else 'FAILED'})")
    return CheckResult(case_id, passed, worst, seeds, metadata["domain"], worst_name)


def load_registry() -> CheckRegistry:
    registry = CheckRegistry()
    if registry.count_checks() == 0:
        registry.reload()
    return registry


def run_checks(registry: Optional[CheckRegistry] = None, seeds: int = 20,
               domains: Optional[Iterable[str]] = DEFAULT_DOMAINS,
               tags: Optional[list[str]] = None) -> list[CheckResult]:
    """Evaluate every selected case for ``seeds`` seeds.

    Args:
        registry: Case registry (discovered on first use when omitted)
        seeds: Number of random draws per case
        domains: Domains to run; ``None`` runs everything
        tags: Further restrict to cases carrying one of these tags

    Returns:
        One ``CheckResult`` per case, ordered by case id

    Raises:
        ConfigurationError: If a requested domain has no cases
    """
    if seeds < 1:
        raise ConfigurationError(f"Need at least one seed, got {seeds}")
    registry = registry or load_registry()
    selected = registry.list_all_checks()
    if domains is not None:
        domains = list(domains)
        unknown = [d for d in domains if d not in registry.list_domains()]
        if unknown:
            raise ConfigurationError(
                f"Unknown gradcheck domain(s) {unknown}, available: {registry.list_domains()}"
            )
        selected = {k: v for k, v in selected.items() if v["metadata"]["domain"] in domains}
    if tags:
        selected = {k: v for k, v in selected.items() if any(t in v["metadata"]["tags"] for t in tags)}
    logger.info(f"Running {len(selected)} gradient checks with {seeds} seeds each")
    return [run_case(case_id, selected[case_id], seeds) for case_id in sorted(selected)]
