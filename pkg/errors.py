"""Exceptions raised by dynamap."""


class DynamapError(Exception):
    """Base class for all dynamap errors."""


class NotHermitian(DynamapError):
    """A matrix required to be Hermitian is not, within tol_herm."""

    def __init__(self, message: str, residual: float = float('nan')):
        super().__init__(message)
        self.residual = residual


class NonHermitianChoi(NotHermitian):
    """The Choi matrix of a map is not Hermitian (the map does not preserve Hermiticity)."""


class DimensionMismatch(DynamapError):
    """Operand dimensions do not agree."""


class ConvergenceFailure(DynamapError):
    """The eigensolver did not converge."""


class ScenarioError(DynamapError):
    """A scenario file failed to parse or validate."""

    def __init__(self, message: str, field: str = ''):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field
