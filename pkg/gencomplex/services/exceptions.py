"""Errors raised by the services; the CLI maps each family to an exit code."""

from typing import Any


class ComputationError(Exception):
    """Base exception for computation-level errors."""


class InputError(ComputationError):
    """Malformed or inconsistent input. The CLI maps it to exit status 2."""


class ParseError(InputError):
    def __init__(self, message: str, *, position: int | None = None, text: str | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position
        self.text = text


class DimensionMismatchError(InputError):
    pass


class DomainError(InputError):
    """Input outside the domain an operation is defined on."""

    def __init__(self, message: str, *, witness: Any = None):
        super().__init__(message)
        self.witness = witness


class MathematicalFailure(ComputationError):
    """A well-formed input failed a mathematical check. The CLI maps it to exit status 1."""

    def __init__(self, message: str, *, witness: Any = None):
        super().__init__(message)
        self.witness = witness


class JacobiError(MathematicalFailure):
    def __init__(self, message: str, *, generator: int, witness: Any = None):
        super().__init__(message, witness=witness)
        self.generator = generator


class DegenerateFormError(MathematicalFailure):
    pass


class NonClosedFormError(MathematicalFailure):
    pass


class IntegrabilityError(MathematicalFailure):
    pass


class AnticommutationError(MathematicalFailure):
    pass


class MasseyUndefinedError(MathematicalFailure):
    pass


class MaurerCartanError(MathematicalFailure):
    pass


class KahlerPairError(MathematicalFailure):
    def __init__(self, message: str, *, minor_index: int | None = None, witness: Any = None):
        super().__init__(message, witness=witness)
        self.minor_index = minor_index


class VerificationFailure(MathematicalFailure):
    """An identity that must hold by theory failed; points at an implementation defect."""
