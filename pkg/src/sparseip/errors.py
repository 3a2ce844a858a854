"""Exceptions raised by sparseip.

Input problems derive from `ValueError`, problems with the instance itself (no
feasible point, unbounded objective, oracle budget) from `SolverError`, and broken
internal guarantees from `InvariantViolation`.
"""


class InvalidInstance(ValueError):
    """Raised when an instance fails validation.

    Args:
        violations (list): The `Violation` records returned by `validate`.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        message = "validation failed: " + "; ".join(str(v) for v in self.violations)
        super().__init__(message)


class ParseError(ValueError):
    pass


class ZeroDemandRow(ValueError):
    pass


class MalformedRow(ValueError):
    pass


class IndexOutOfRange(ValueError):
    pass


class ParameterError(ValueError):
    pass


class UnknownFixture(ValueError):
    pass


class WidthTooSmall(ValueError):
    pass


class SolverError(Exception):
    pass


class InfeasibleInstance(SolverError):
    pass


class UnboundedInstance(SolverError):
    pass


class BudgetExceeded(SolverError):
    pass


class LpTooLarge(SolverError):
    pass


class InvariantViolation(RuntimeError):
    """Raised when a guarantee the algorithms rely on does not hold at runtime."""


class DegreeContractViolated(InvariantViolation):
    pass


class StructureViolation(InvariantViolation):
    pass
