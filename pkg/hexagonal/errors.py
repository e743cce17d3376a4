"""
Exception hierarchy shared by the algebra kernels, the geometry pipeline and the CLI.

Every exception carries the process exit code the CLI maps it to.
"""
from typing import List, Optional, Sequence


class HexagonalError(Exception):
    """Base class for all errors raised by the package."""

    exit_code: int = 1


class ConfigurationError(HexagonalError):
    """Invalid run configuration (bad prime, bad subset, malformed file)."""

    exit_code = 2


class UnsupportedModelError(ConfigurationError):
    """Requested number of pencils has no implemented plane model."""

    def __init__(self, k, supported: Sequence[int]):
        self.k = k
        self.supported = list(supported)
        listed = ", ".join(str(s) for s in self.supported)
        super().__init__(
            f"k={k} is not supported; supported values are {{{listed}}} "
            f"(k=12 and the infinite-pencil model are not implemented)"
        )


class InconsistentSystemError(HexagonalError):
    """Right-hand side columns outside the column span of the coefficient matrix."""

    def __init__(self, columns: Sequence[int]):
        self.columns = list(columns)
        super().__init__(f"linear system inconsistent in columns {self.columns[:10]}")


class NotInSpanError(HexagonalError):
    """A polynomial is not a combination of the given basis."""

    def __init__(self, residual):
        self.residual = residual
        super().__init__(f"polynomial not in span, residual {residual}")


class LiftError(HexagonalError):
    """A column of the target map is not in the image of the map lifted through."""

    def __init__(self, column: int, position: Optional[int] = None):
        self.column = column
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"column {column} not in the image{where}")


class DegenerateConfigurationError(HexagonalError):
    """Points or pencils that violate the general-position assumptions."""


class EmptyLinearSystemError(HexagonalError):
    """A linear system of plane curves has no nonzero member."""


class GenericityError(HexagonalError):
    """A dimension count differs from its generic value; a redraw may help."""


class SpanMatchingError(HexagonalError):
    """Fiber spans of a pencil could not be matched into a scroll matrix."""

    def __init__(self, label: str, ambiguity: Optional[int]):
        self.label = label
        self.ambiguity = ambiguity
        if ambiguity is None:
            super().__init__(f"pencil {label}: no consistent scroll matching")
        else:
            super().__init__(f"pencil {label}: scroll matching ambiguity of dimension {ambiguity}")


class VerificationError(HexagonalError):
    """A computed object failed one or more of its certificates."""

    def __init__(self, failed: List[str]):
        self.failed = list(failed)
        super().__init__("failed checks: " + ", ".join(self.failed))


class RetryExhaustedError(HexagonalError):
    """No generic random configuration found within the retry bound."""

    exit_code = 3

    def __init__(self, k: int, attempts: int, last_error: Optional[Exception] = None):
        self.k = k
        self.attempts = attempts
        self.last_error = last_error
        super().__init__(f"k={k}: no generic model after {attempts} attempts (last: {last_error})")
