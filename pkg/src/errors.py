class BalayageError(Exception):
    """Base class for all toolkit errors"""


class InvalidInputError(BalayageError, ValueError):
    """An operation was called outside its preconditions"""


class DivergentIntegralError(BalayageError, ArithmeticError):
    """An integral diverges (e.g. a counting integral down to an atom)"""


class SingularSampleError(BalayageError, ArithmeticError):
    """Quadrature keeps landing on a singular sample after rotated retries"""


class SolverStalledError(BalayageError, RuntimeError):
    """The active-set solver hit its iteration cap"""

    def __init__(self, message: str, iterations: int):
        super().__init__(message)
        self.iterations = iterations


class SchemaError(BalayageError):
    """Input file could not be read or does not match the expected schema"""
