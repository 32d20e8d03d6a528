"""Exception hierarchy.

Each class maps to one failure mode so callers (notably the command line
front end) can translate failures into exit codes without string matching.
"""


class EigenbundleError(Exception):
    """Base class for all errors raised by this package."""


class PreconditionError(EigenbundleError, ValueError):
    """An input violates a documented precondition."""


class EvaluationError(PreconditionError):
    """A field produced non-finite entries; ``node`` names the first offender."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class ContractError(PreconditionError):
    """A matrix argument is not of the promised kind (projector, normal, ...)."""


class DomainError(PreconditionError):
    """The requested quantity is undefined for the given pair of fields."""


class InfeasibleError(PreconditionError):
    """A prescribed Chern tuple violates a necessary cohomological relation."""


class DegeneracyError(PreconditionError):
    """Lines fail to span, or eigenvalues collide, at some node."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class SolverError(EigenbundleError):
    """The eigen-solver residual contract could not be met."""


class InconclusiveError(EigenbundleError):
    """The mesh is too coarse for a trustworthy integer answer."""


class ResolutionError(InconclusiveError):
    """A discretization quantity (overlap, matching margin) is below threshold."""


class MonodromyError(InconclusiveError):
    """No continuous eigenvalue ordering was found at this resolution."""
