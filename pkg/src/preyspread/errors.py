"""Exception hierarchy shared across the package."""


class PreyspreadError(Exception):
    """Base class for all package-specific errors."""


class DomainError(PreyspreadError, ValueError):
    """Inputs outside the mathematical domain of an operation."""


class ModelDefinitionError(PreyspreadError):
    """A kinetics model returned non-finite values or is otherwise ill-posed."""


class NoInteriorEquilibrium(PreyspreadError):
    """No coexistence state found in the open set 0 < u < 1, v > 0."""


class ConfigError(PreyspreadError, ValueError):
    """Invalid simulation or sweep configuration."""


class CFLViolation(PreyspreadError):
    """Requested time step exceeds the explicit stability limit."""


class NonFiniteState(PreyspreadError):
    """NaN or Inf appeared in a simulation field."""


class FrontReachedBoundary(PreyspreadError):
    """A front came too close to the domain boundary; results beyond
    ``self.time`` would be contaminated.  The partial output collected up to
    that time is attached as ``self.partial``."""

    def __init__(self, time, partial=None):
        super().__init__(f"front reached boundary guard at t={time:g}")
        self.time = time
        self.partial = partial


class StepTooLarge(PreyspreadError):
    """Profile integration blew up; reduce the step size."""


class ShootInconclusive(PreyspreadError):
    """Profile integration ended without a classifiable outcome."""


class BisectionBracketFailure(PreyspreadError):
    """Wave-speed bisection could not establish (or keep) a valid bracket."""


class InsufficientData(PreyspreadError):
    """Not enough trace points for a speed estimate."""


class RegimeUndetermined(PreyspreadError):
    """Spreading regime unavailable (speeds undefined for the model)."""


class LyapunovValidityError(PreyspreadError):
    """Parameters violate the validity condition of a Lyapunov function."""


class TheoremScopeWarning(UserWarning):
    """A quantity was computed outside the regime where its supporting
    statement is known to hold (e.g. final-zone metrics with d != 1)."""


class BoundaryExitWarning(UserWarning):
    """A kinetic trajectory left the open invariant region numerically."""


class MonotonicityViolation(PreyspreadError):
    """A computed family violated a monotonicity guarantee beyond tolerance."""
