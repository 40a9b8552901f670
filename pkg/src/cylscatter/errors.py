"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematically admissible range."""


class ParameterRangeError(DomainError):
    """Family parameters violate positivity of the generating function."""


class IntegrationError(RuntimeError):
    """An ODE integration failed to reach its target."""


class AccuracyError(RuntimeError):
    """A quadrature or series did not converge to the requested tolerance."""


class BranchError(RuntimeError):
    """The mod-1 branch of a phase shift could not be resolved."""


class ConfigurationError(RuntimeError):
    """Solver configuration is inconsistent (e.g. matching radius too small)."""
