"""Exception hierarchy mapped to process exit codes.

The command line tool translates these to exit codes: configuration and
input problems exit with 2, physical-regime failures (unstable trap, no
equilibrium, cavity instability) with 3, and numerical failures (integration
blow-up, insufficient data) with 4.
"""


class NanorotorError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(NanorotorError):
    """Malformed configuration: syntax, units, unknown keys, range checks."""

    exit_code = 2


class PhysicsError(NanorotorError):
    """Requested operating point is outside the valid physical regime."""

    exit_code = 3


class UnstableTrapError(PhysicsError):
    """Orientation/position Hessian is not positive definite on the confined
    subspace, or the cavity stability condition fails."""


class EquilibriumNotFoundError(PhysicsError):
    """Damped Newton iteration did not converge to a force-free point."""


class NumericalError(NanorotorError):
    """Numerical procedure failed (non-finite state, tolerance not met)."""

    exit_code = 4


class IntegrationError(NumericalError):
    """Trajectory integration produced a non-finite or runaway state."""


class InsufficientDataError(NumericalError):
    """Not enough samples for the requested estimate (e.g. < 4 PSD segments)."""
