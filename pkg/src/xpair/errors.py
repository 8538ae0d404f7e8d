"""Exception types shared across the package."""


class XpairError(Exception):
    """Base class for all package-specific errors."""


class ForbiddenKinematicsError(XpairError):
    """The requested configuration cannot satisfy energy-momentum conservation."""


class InconsistentKinematicsError(XpairError):
    """An (omega1, omega2) pair does not solve the conservation equations."""


class DegenerateGeometryError(XpairError):
    """A geometric invariant vanished (e.g. k.p = 0)."""


class IRCutoffError(XpairError):
    """Evaluation requested inside the infrared-divergent strip."""


class IntegrationFailureError(XpairError):
    """Adaptive integration did not converge; carries the best estimate."""

    def __init__(self, message, estimate=None, error_bound=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class EnvelopeViolationError(XpairError):
    """The sampled density exceeded its rejection envelope in some cell."""

    def __init__(self, message, cell=None, density=None, bound=None):
        super().__init__(message)
        self.cell = cell
        self.density = density
        self.bound = bound


class ScenarioError(XpairError):
    """Scenario file failed validation; message names the offending key."""
