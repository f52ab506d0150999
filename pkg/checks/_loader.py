"""Discovery of ``@gradcheck`` factories under ``checks/<domain>/*.py``."""

import importlib
import logging
from pathlib import Path
from typing import Dict, Optional

from checks._decorators import get_check_metadata

logger = logging.getLogger(__name__)


class CheckLoader:
    """Walks the domain sub-packages of ``checks`` and collects decorated factories."""

    def __init__(self, checks_dir: Optional[Path] = None):
        self.checks_dir = checks_dir or Path(__file__).parent

    def discover_checks(self) -> Dict[str, dict]:
        """Scan every domain directory.

        Returns:
            ``{"domain.name": {"factory": callable, "metadata": {...}}}``
        """
        discovered = {}
        logger.debug(f"Discovering checks in: {self.checks_dir}")
        for subdir in sorted(self.checks_dir.iterdir()):
            if not subdir.is_dir() or subdir.name.startswith("_"):
                continue
            discovered.update(self._scan_domain_directory(subdir.name, subdir))
        logger.info(f"Discovery complete: found {len(discovered)} gradient checks")
        return discovered

    def _scan_domain_directory(self, domain_name: str, domain_dir: Path) -> dict:
        discovered = {}
        for py_file in sorted(domain_dir.glob("*.py")):
            if py_file.name.startswith("_"):
                continue
            module_path = f"checks.{domain_name}.{py_file.stem}"
            module = importlib.import_module(module_path)
            for attr_name in dir(module):
                if attr_name.startswith("_"):
                    continue
                attr = getattr(module, attr_name)
                metadata = get_check_metadata(attr)
                if metadata is None or metadata["module"] != module.__name__:
                    continue
                check_id = f"{metadata['domain']}.{metadata['name']}"
                discovered[check_id] = {"factory": attr, "metadata": metadata}
                logger.debug(f"Discovered check: {check_id}")
        return discovered
