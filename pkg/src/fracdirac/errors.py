"""Exception hierarchy shared by all fracdirac modules."""


class FracDiracError(Exception):
    """Base class for every error raised by this package."""


class DomainError(FracDiracError, ValueError):
    """An argument lies outside the domain of a map (e.g. negative x for x**alpha)."""


class ArgumentError(FracDiracError, ValueError):
    """Inconsistent or malformed arguments (bad interval, length mismatch, ...)."""


class ExpressionSyntaxError(FracDiracError, ValueError):
    """Malformed coefficient text; ``offset`` is the 0-based byte offset of the problem."""

    def __init__(self, message, offset, source=""):
        self.offset = offset
        self.source = source
        super().__init__(f"{message} at offset {offset}")


class UnknownFunctionError(ExpressionSyntaxError):
    pass


class EvaluationError(FracDiracError, ArithmeticError):
    """Evaluation of a coefficient expression hit a singular or non-finite value."""

    def __init__(self, message, node=None):
        self.node = node
        super().__init__(message)


class CapabilityError(FracDiracError):
    """The requested operation is not supported for this input (e.g. d/dS of x)."""


class DivergenceError(FracDiracError, ArithmeticError):
    def __init__(self, message, step=None, lam=None):
        self.step = step
        self.lam = lam
        super().__init__(message)


class ConvergenceError(FracDiracError):
    pass


class ConsistencyError(FracDiracError):
    pass


class DegenerateSlopeError(FracDiracError):
    pass


class StudyError(FracDiracError):
    pass
