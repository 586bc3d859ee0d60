from typing import Any


class BelieflangError(Exception):
    """Base class for every error raised by belieflang.

    Each subclass carries the process exit code the command-line front
    end uses for it and a short slug printed as the reason prefix.
    """

    exit_code: int = 1
    slug: str = "error"


class DomainError(BelieflangError, ValueError):
    """A value does not belong to the carrier it is used with."""

    exit_code = 2
    slug = "domain-error"


class CapacityError(BelieflangError):
    """An enumeration would exceed its configured bound."""

    exit_code = 2
    slug = "capacity-error"

    def __init__(self, message: str, bound: int):
        super().__init__(f"{message} (bound: {bound})")
        self.bound = bound


class FormulaError(BelieflangError):
    """A formula or term is malformed or does not resolve."""

    exit_code = 3
    slug = "formula-error"


class ParseError(FormulaError):
    """Syntax error at a character position of the source text."""

    slug = "syntax-error"

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class ModelError(BelieflangError):
    """A model document violates its schema or an invariant."""

    exit_code = 2
    slug = "model-invalid"


class EvaluationError(BelieflangError):
    """The interpretation of a formula cannot be computed."""

    exit_code = 4
    slug = "evaluation-error"


class ConvergenceError(EvaluationError):
    """A fixed-point iteration ran out of iterations."""

    exit_code = 5
    slug = "convergence-failure"

    def __init__(self, message: str, trace: Any):
        super().__init__(message)
        self.trace = trace
