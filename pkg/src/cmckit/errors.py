"""Exception types shared across the package."""


class GeometryError(Exception):
    """Base class for geometric / numerical failures."""


class DegeneratePointError(GeometryError):
    """Metric is degenerate (EG - F^2 <= 0) at the requested point."""


class NotCurvatureCoordinateError(GeometryError):
    """Patch is not in conformal curvature coordinates (or H is not constant)."""


class SingularOffsetError(GeometryError):
    """Parallel-surface transformation hit a singular point (1 + rho*kappa ~ 0)."""


class InjectivityError(GeometryError):
    """Tangent-plane projection is not injective at the requested radius.

    ``max_radius`` reports the largest radius that did work, if any.
    """

    def __init__(self, message, max_radius=0.0):
        super().__init__(message)
        self.max_radius = max_radius


class IntegrationError(GeometryError):
    """Profile integration failed (step underflow or inconsistent data)."""


class InfeasibleConfigurationError(GeometryError):
    """No surface of the requested family fits the boundary configuration."""


class InputError(GeometryError):
    """Invalid user-supplied data (files, curves, configuration values)."""
