"""Exception hierarchy shared across the package."""

from __future__ import annotations


class PlanningError(Exception):
    """Base class for every error raised by dualmem."""


class CanonicalizationError(PlanningError, ValueError):
    pass


class TypeMismatchError(PlanningError, TypeError):
    pass


class ConstraintError(PlanningError, ValueError):
    """A constraint or constraint set breaks a structural invariant."""


class IncompleteQueryError(PlanningError, ValueError):
    def __init__(self, family: str, message: str | None = None):
        self.family = family
        super().__init__(message or f"query is missing a mandatory {family} constraint")


class PlanParseError(PlanningError, ValueError):
    def __init__(self, message: str, line: str = ""):
        self.line = line
        super().__init__(f"{message}: {line!r}" if line else message)


class EmptyConstraintsError(PlanningError, ValueError):
    pass


class InstanceTooLargeError(PlanningError, ValueError):
    pass


class InfeasibleError(PlanningError, ValueError):
    pass


class ArgumentError(PlanningError, ValueError):
    pass


class ExtractionError(PlanningError, RuntimeError):
    pass


class TemplateError(PlanningError, KeyError):
    def __init__(self, slot: str):
        self.slot = slot
        super().__init__(slot)

    def __str__(self) -> str:
        return f"missing mandatory template slot {{{self.slot}}}"


class ReplyParseError(PlanningError, ValueError):
    def __init__(self, message: str, raw: str = ""):
        self.raw = raw
        super().__init__(message)


class ExtractionParseError(ReplyParseError):
    pass


class TransportError(PlanningError, RuntimeError):
    pass


class TransientTransportError(TransportError):
    """Retryable failure (timeouts, rate limits, 5xx)."""


class ReplayMissError(TransportError):
    def __init__(self, key: str):
        self.key = key
        super().__init__(f"no recorded reply for request {key}")


class DatasetError(PlanningError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class GenerationError(PlanningError, ValueError):
    pass


class EvalConfigError(PlanningError, ValueError):
    pass
