"""Decorator marking gradient-check case factories for discovery.

A case factory takes a ``SplitMix64`` stream and returns a ``GradCase``;
the loader finds every decorated factory under ``checks/<domain>/`` and the
runner compares the engine's gradients with central differences on it.
"""

from typing import Callable, Optional
import inspect
import logging

logger = logging.getLogger(__name__)

DEFAULT_EPS = 1e-4
COMPOSITE_EPS = 1e-6
COMPOSITE_ENTRIES = 24


def gradcheck(
    domain: str,
    name: Optional[str] = None,
    description: Optional[str] = None,
    tags: Optional[list[str]] = None,
    eps: float = DEFAULT_EPS,
    tolerance: float = 1e-5,
    entries: Optional[int] = None,
):
    """Register a function as a gradient-check case factory.

    Usage:
        @gradcheck(domain="primitives", tags=["elementwise"])
        def exp_case(rng):
            x = rng.uniform((3, 4), -1.0, 1.0)
            return GradCase(lambda a: ops.exp(a).sum(), {"x": x})

    Args:
        domain: Group the case belongs to (e.g. "primitives", "stgde")
        name: Optional custom name (defaults to function name)
        description: Optional description (defaults to docstring)
        tags: Searchable tags
        eps: Central-difference step
        tolerance: Largest accepted relative error
        entries: Coordinates differenced per input (all when omitted);
            larger inputs are sampled

    Returns:
        The factory with a ``_check_metadata`` attribute
    """
    if tags is None:
        tags = []

    def decorator(func: Callable) -> Callable:
        if len(inspect.signature(func).parameters) != 1:
            raise TypeError(f"Gradcheck factory {func.__name__} must take exactly one rng argument")
        case_description = description
        if case_description is None:
            case_description = (func.__doc__ or f"{func.__name__} case").strip()

        func._check_metadata = {
            "domain": domain,
            "name": name or func.__name__,
            "description": case_description,
            "tags": tags,
            "eps": eps,
            "tolerance": tolerance,
            "entries": entries,
            "module": func.__module__,
        }
        logger.debug(f"Decorated check: {func._check_metadata['name']} in domain '{domain}'")
        return func

    return decorator


def get_check_metadata(func: Callable) -> Optional[dict]:
    return getattr(func, "_check_metadata", None)


def is_check(func: Callable) -> bool:
    return hasattr(func, "_check_metadata")
