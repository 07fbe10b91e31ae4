"""Exact recovery of sparse spike trains and non-uniform splines on [-1, 1]
from finitely many inner products with an algebraic polynomial basis."""

from .bases import (
    BasisSpec,
    DerivativeMatrix,
    MomentVector,
    change_of_basis,
    derivative_matrix,
    eval_basis,
    moments_of_dirac,
    moments_of_spline,
)
from .bivariate import (
    BivariatePoly,
    DiracMeasure2D,
    build_certificate_2d,
    check_separation_2d,
    moments_2d,
    recover_spikes_2d,
    verify_certificate_2d,
)
from .certificates import (
    AlgebraicPoly,
    CertificateReport,
    EvenTrigPoly,
    TrigPoly,
    build_certificate,
    build_trig_certificate,
    reflect_knots,
    symmetrize,
    to_algebraic,
    verify_certificate,
)
from .estimators import SpikeRecovery, SplineRecovery
from .exceptions import (
    CertificateConstructionError,
    DegenerateLocationsError,
    DomainError,
    GenerationError,
    IllPosedInputError,
    InfeasibleError,
    NonconvergenceError,
    OrderEstimationError,
    PolyspikeError,
    ReconstructionInconsistentError,
    RecoveryInconsistentError,
    ReflectionCollisionError,
    SeparationViolationError,
    SolverError,
    ValidationError,
)
from .measures import (
    DiracMeasure,
    SeparationReport,
    Spline,
    cheb_distance,
    check_separation,
    eval_spline,
    spline_distributional_derivative,
    tv_norm,
)
from .solvers import (
    RecastMoments,
    SolverOptions,
    matrix_pencil,
    recast_moments,
    recover_spikes,
    solve_coefficients,
    tv_lp_recover,
)
from .splines import (
    SplineProblem,
    consistency_check,
    derivative_moments,
    integrate_back,
    recover_spline,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
