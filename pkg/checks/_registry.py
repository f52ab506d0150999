"""Singleton registry of discovered gradient-check cases.

The registry stores every factory decorated with ``@gradcheck`` together
with its metadata, and answers lookups by domain, tag or id.
"""

from typing import Callable, Optional
import logging

logger = logging.getLogger(__name__)


class CheckRegistry:
    """Central registry for gradient-check case factories.

    Example:
        registry = CheckRegistry()
        registry.register_check("primitives.exp_case", factory, metadata)
        cases = registry.get_checks_by_domain("primitives")
    """

    _instance = None
    _checks = {}
    _initialized = False

    def __new__(cls):
        """Return the one shared registry instance."""
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self):
        if not CheckRegistry._initialized:
            CheckRegistry._checks = {}
            CheckRegistry._initialized = True
            logger.debug("Check registry initialized")

    def register_check(self, check_id: str, factory: Callable, metadata: dict):
        """Register a case factory.

        Args:
            check_id: Unique identifier, "<domain>.<name>" (e.g. "stgde.depth_head")
            factory: Callable taking a ``SplitMix64`` stream and returning a ``GradCase``
            metadata: Dictionary written by ``@gradcheck`` (domain, tags, eps, tolerance, entries)
        """
        self._checks[check_id] = {"factory": factory, "metadata": metadata}
        logger.debug(f"Registered check: {check_id}")

    def get_checks_by_domain(self, domain: str) -> list:
        """Get all cases of one domain.

        Args:
            domain: The domain to filter by (e.g. "primitives", "codec")

        Returns:
            List of check dictionaries in that domain
        """
        checks = [c for c in self._checks.values() if c["metadata"]["domain"] == domain]
        logger.debug(f"Found {len(checks)} checks for domain '{domain}'")
        return checks

    def get_checks_by_tags(self, tags: list[str]) -> list:
        """Get cases carrying any of the given tags.

        Args:
            tags: Tags to search for

        Returns:
            List of check dictionaries matching at least one tag
        """
        return [c for c in self._checks.values() if any(t in c["metadata"]["tags"] for t in tags)]

    def get_check(self, check_id: str) -> Optional[dict]:
        """Get one case by id.

        Args:
            check_id: The unique case identifier

        Returns:
            Check dictionary, or None if no such case is registered
        """
        check = self._checks.get(check_id)
        if check is None:
            logger.warning(f"Check not found: {check_id}")
        return check

    def list_all_checks(self) -> dict:
        """Return a copy of every registered case, keyed by check id."""
        return self._checks.copy()

    def list_domains(self) -> list[str]:
        """List the domains that have at least one case.

        Returns:
            Sorted list of unique domain names
        """
        return sorted({c["metadata"]["domain"] for c in self._checks.values()})

    def list_check_ids(self) -> list[str]:
        return sorted(self._checks)

    def count_checks(self, domain: Optional[str] = None) -> int:
        """Count registered cases.

        Args:
            domain: Optional domain filter

        Returns:
            Number of cases, overall or within ``domain``
        """
        if domain is None:
            return len(self._checks)
        return len(self.get_checks_by_domain(domain))

    def clear(self):
        """Drop every registered case (tests and reloads)."""
        count = len(self._checks)
        self._checks.clear()
        logger.debug(f"Cleared {count} checks from registry")

    def reload(self):
        """Clear the registry and re-run discovery over ``checks/<domain>/``."""
        self.clear()
        # imported here: the loader imports the case modules, which import the registry package
        from checks._loader import CheckLoader

        for check_id, data in CheckLoader().discover_checks().items():
            self.register_check(check_id, data["factory"], data["metadata"])
        logger.info(f"Reload complete: {len(self._checks)} checks registered")

    def get_summary(self) -> dict:
        """Summarize the registry.

        Returns:
            Dictionary with the total, the domains and the count per domain
        """
        domains = self.list_domains()
        return {
            "total_checks": len(self._checks),
            "domains": domains,
            "checks_per_domain": {d: self.count_checks(d) for d in domains},
        }

    def __repr__(self) -> str:
        return f"<CheckRegistry: {len(self._checks)} checks across {len(self.list_domains())} domains>"
