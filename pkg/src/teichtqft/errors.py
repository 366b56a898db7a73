"""Exception types shared across the package."""


class TeichTQFTError(Exception):
    """Base class for all package errors."""


class DomainError(TeichTQFTError):
    """Parameters lie outside the admissible domain of an operation."""


class PoleError(DomainError):
    """Evaluation point is within the configured radius of a pole."""


class ZeroError(DomainError):
    """Evaluation point is within the configured radius of a zero."""


class LadderOverflow(TeichTQFTError):
    """Functional-equation ladder would need more steps than allowed."""


class ConvergenceError(TeichTQFTError):
    """A truncation or grid-doubling loop failed to reach tolerance."""


class SectorBoundaryError(DomainError):
    """Direction is too close to an asymptotic sector boundary."""


class ValidationError(TeichTQFTError):
    """A triangulation fails a structural invariant."""


class ParseError(TeichTQFTError):
    """A triangulation file cannot be parsed; carries location context."""


class ShapeInfeasible(TeichTQFTError):
    """No positive shape solution exists for the requested move."""

    def __init__(self, message, violated=None):
        super().__init__(message)
        self.violated = violated


class NotAdjacent(TeichTQFTError):
    """The two tetrahedra do not share the required face."""


class PatternMismatch(TeichTQFTError):
    """The local configuration does not match the move pattern."""


class DimensionGuard(DomainError):
    """Too many integration dimensions for the tensor-grid evaluator."""
