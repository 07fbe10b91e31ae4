"""Exception hierarchy shared across the package."""


class PolyspikeError(Exception):
    """Base class for all package-specific errors."""


class DomainError(PolyspikeError, ValueError):
    """Input lies outside [-1, 1] (beyond the clamp tolerance)."""


class ValidationError(PolyspikeError, ValueError):
    """Malformed or inconsistent input data."""


class ReflectionCollisionError(PolyspikeError, ValueError):
    """A point at 0 or -pi would coincide with its mirror image."""


class CertificateConstructionError(PolyspikeError, RuntimeError):
    """The kernel interpolation system is singular."""


class SeparationViolationError(PolyspikeError, ValueError):
    """Knot set fails the minimal separation condition."""


class SolverError(PolyspikeError, RuntimeError):
    """Base class for recovery-solver failures."""


class OrderEstimationError(SolverError):
    """Estimated model order exceeds the configured maximum."""


class IllPosedInputError(SolverError):
    """Pencil eigenvalues are too far from the unit circle."""


class DegenerateLocationsError(SolverError):
    """Collocation matrix is rank deficient."""


class RecoveryInconsistentError(SolverError):
    """Recovered measure does not reproduce the input moments."""


class InfeasibleError(SolverError):
    """LP constraints are infeasible at the grid resolution."""


class NonconvergenceError(SolverError):
    """LP solver hit its iteration cap without converging."""


class ReconstructionInconsistentError(SolverError):
    """Recovered spline fails the forward moment / boundary check."""


class GenerationError(PolyspikeError, ValueError):
    """Requested synthetic instance is infeasible."""
