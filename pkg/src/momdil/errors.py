"""Exception hierarchy shared by every module."""

from __future__ import annotations


class MomdilError(Exception):
    """Base class for all library errors."""


class InputError(MomdilError):
    """Malformed or inconsistent user input (files, configs, text)."""


class MathFailure(MomdilError):
    """A mathematical hypothesis did not hold for the given data."""


class CapacityExceeded(MomdilError):
    pass


class DimensionMismatch(InputError, ValueError):
    pass


class NonHermitianInput(MathFailure, ValueError):
    pass


class NotPSD(MathFailure):
    pass


class AlphabetMismatch(InputError, ValueError):
    pass


class OutOfRange(InputError, ValueError):
    pass


class ParseError(InputError):
    pass


class ValidationError(InputError):
    pass


class PolySyntaxError(InputError, ValueError, SyntaxError):
    """Polynomial text does not match the grammar.

    ``position`` is a 0-based character offset into the original text and
    ``expected`` the set of token kinds that would have been accepted there.
    """

    def __init__(self, message: str, position: int, expected=(), text: str = ""):
        self.position = position
        self.expected = frozenset(expected)
        self.text = text
        detail = f"{message} at position {position}"
        if self.expected:
            detail += f" (expected one of: {', '.join(sorted(self.expected))})"
        super().__init__(detail)
        self.msg = detail
        self.offset = position + 1

    def __str__(self) -> str:
        return self.msg


class EmptyInput(PolySyntaxError):
    pass


class GeneratorOutOfRange(PolySyntaxError):
    pass


class InsufficientDepth(InputError, ValueError):
    pass


class DepthExceeded(InputError, ValueError):
    pass


class NotDominated(MathFailure):
    def __init__(self, message: str, margin: float | None = None, witness=None):
        super().__init__(message)
        self.margin = margin
        self.witness = witness


class IllConditioned(MathFailure):
    pass


class NotContractive(MathFailure):
    pass
