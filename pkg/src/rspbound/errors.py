"""Exception hierarchy shared by all modules."""


class RspBoundError(Exception):
    """Base class for every error raised by this package."""


class StructuralError(RspBoundError, ValueError):
    """Malformed input: bad dimensions, invalid node ids, empty families."""


class DomainError(RspBoundError, ValueError):
    """Argument outside the mathematical domain of a function."""


class PreconditionError(RspBoundError, ValueError):
    """Input is well formed but violates a documented precondition."""


class SingularMatrixError(RspBoundError, ArithmeticError):
    """Exact elimination found no pivot."""


class InfeasibleError(RspBoundError):
    """No feasible basis / no path from source to sink."""


class ResourceLimitError(RspBoundError, RuntimeError):
    """An enumeration would exceed its configured cap."""


class ConvergenceError(RspBoundError, ArithmeticError):
    """An iterative special-function evaluation did not converge."""


class GraphFormatError(StructuralError):
    """Parse error in a graph file; carries the offending line number."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno
