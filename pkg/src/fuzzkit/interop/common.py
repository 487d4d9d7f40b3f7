"""Shared plumbing for the foreign-format readers."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class FormatDiagnostics:
    """Tolerated deviations collected while reading a foreign file.

    ``warnings`` holds (location, message) pairs; ``source_format`` tags the
    reader that produced them ("fcl" or "fis").
    """

    source_format: str
    warnings: list[tuple[str, str]] = field(default_factory=list)

    def warn(self, location: str, message: str) -> None:
        self.warnings.append((location, message))
