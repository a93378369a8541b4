"""Exception hierarchy for the formal-language engine.

Every failure mode that the verifier must map onto a diagnostic code gets
its own exception class, so the verdict layer can classify by type alone.
"""


class GeoformalError(Exception):
    """Base class for all engine errors."""


# --- parsing / registry ---

class UnknownOperatorError(GeoformalError):
    def __init__(self, name: str):
        super().__init__(f"unknown operator: {name!r}")
        self.name = name


class ArityMismatchError(GeoformalError):
    pass


class MalformedOperandError(GeoformalError):
    pass


class MalformedExpressionError(GeoformalError):
    pass


class DuplicateBindingError(GeoformalError):
    pass


class NonProblemTargetError(GeoformalError):
    pass


class UnbalancedBracesError(GeoformalError):
    pass


class NoBoxedAnswerError(GeoformalError):
    pass


# --- solving / execution ---

class UnboundOperandError(GeoformalError):
    pass


class UnboundSymbolError(GeoformalError):
    pass


class DomainError(GeoformalError):
    """Out-of-domain evaluation: sqrt of a negative, |asin arg| > 1, etc."""


class NoRealRootError(GeoformalError):
    pass


class UnsupportedShapeError(GeoformalError):
    pass


class UnsolvedSystemError(GeoformalError):
    pass


class AmbiguousSolutionError(GeoformalError):
    pass


class InconsistentSystemError(GeoformalError):
    pass


class NoGetInstructionError(GeoformalError):
    pass


class UnsolvedVariableError(GeoformalError):
    pass


class SolveTimeoutError(UnsolvedSystemError):
    """Solve exceeded its step or wall-clock budget."""


# --- harness ---

class SchemaError(GeoformalError):
    pass


class MissingRecordError(GeoformalError):
    pass


class InsufficientSamplesError(GeoformalError):
    pass
