"""Readers for foreign fuzzy-system file formats."""

from .common import FormatDiagnostics
from .fcl import parse_fcl
from .fis import parse_fis

__all__ = ["FormatDiagnostics", "parse_fcl", "parse_fis"]
