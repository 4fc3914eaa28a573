"""Exception types shared across the package."""


class KuramemError(Exception):
    """Base class for all package-specific errors."""


class ParameterDomainError(KuramemError, ValueError):
    """A constructor or operation received parameters outside its domain."""


class NotAnEquilibriumError(KuramemError):
    """Stability classification was asked for a state that is not stationary."""


class NonIntegerWindingError(KuramemError):
    """A cycle sum failed to round to an integer multiple of 2*pi.

    Always indicates a wrapping or orientation bug, never a property of
    the input state.
    """


class IntegrationBlowUpError(KuramemError):
    """The integrator produced a non-finite state."""


class EnumerationBudgetError(KuramemError):
    """The winding-vector box is too large for exhaustive enumeration."""


class RetrievalError(KuramemError):
    """Pattern retrieval failed (no convergence, or winding out of range)."""
