"""Exception types shared across the package."""

from __future__ import annotations


class KpsatoError(Exception):
    """Base class for all package errors."""


class ConfigurationError(KpsatoError, ValueError):
    """Operands carry incompatible truncation data or coefficient rings."""


class NonUnitError(KpsatoError, ZeroDivisionError):
    """Inversion requested for an element that is not a unit."""


class TruncationBudgetError(KpsatoError):
    """The requested result needs more precision than the inputs carry."""

    def __init__(self, message: str, required: int | None = None):
        super().__init__(message)
        self.required = required


class DerivationError(KpsatoError):
    """A symbolic derivation left a nonzero residual."""

    def __init__(self, message: str, residual=None):
        super().__init__(message)
        self.residual = residual


class NotFredholmError(KpsatoError):
    """A subspace is not eventually standard, so no index exists."""


class ParseError(KpsatoError, ValueError):
    """Textual input could not be parsed."""

    def __init__(self, message: str, text: str = "", position: int = 0, expected: str = ""):
        self.text = text
        self.position = position
        self.expected = expected
        detail = message
        if expected:
            detail += f" (expected {expected})"
        detail += f" at position {position}"
        if text:
            detail += f"\n  {text}\n  {' ' * position}^"
        super().__init__(detail)
