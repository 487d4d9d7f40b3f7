"""Exception hierarchy shared by the model, parsers, engine and CLI."""

from __future__ import annotations


class FuzzkitError(Exception):
    """Base class for all errors raised by this package."""


class ModelError(FuzzkitError):
    """Invalid model structure or parameters detected at construction time."""


class ParseError(FuzzkitError):
    """Syntax or semantic error in a textual model source.

    Carries enough position information to point an editor at the offending
    token: ``line`` and ``column`` are 1-based, ``expected`` optionally names
    what the parser was looking for.
    """

    def __init__(self, message: str, line: int = 0, column: int = 0,
                 expected: str | None = None, origin: str = "<input>"):
        self.message = message
        self.line = line
        self.column = column
        self.expected = expected
        self.origin = origin
        loc = f"{origin}:{line}:{column}: " if line else f"{origin}: "
        hint = f" (expected {expected})" if expected else ""
        super().__init__(f"{loc}{message}{hint}")


class EvaluationError(FuzzkitError):
    """Runtime failure while running inference."""


class MissingInputError(EvaluationError):
    """An input variable required by the system was not supplied."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"missing input: {name}")


class CodegenError(FuzzkitError):
    """The requested system cannot be turned into standalone code."""
