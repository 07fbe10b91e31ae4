"""Spike recovery from moment vectors: a matrix-pencil path through the
cosine recast, and a grid-discretized TV-minimization linear program."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.optimize import linprog

from .bases import BasisSpec, MomentVector, basis_matrix, change_of_basis
from .exceptions import (
    DegenerateLocationsError,
    IllPosedInputError,
    InfeasibleError,
    NonconvergenceError,
    OrderEstimationError,
    RecoveryInconsistentError,
    ValidationError,
)
from .measures import DiracMeasure


@dataclass(frozen=True)
class RecastMoments:
    """Cosine moments s_k = sum_m c_m cos(k t_m) with t_m = arccos(x_m)."""

    N: int
    s: np.ndarray


@dataclass(frozen=True)
class SolverOptions:
    method: str = "pencil"
    pencil_rank_tol: float = 1e-8
    lp_grid_size: int | None = None  # default 16 N + 1 (per axis in 2D: 2 N + 1)
    lp_nonnegative: bool = False
    coefficient_tol: float = 1e-8
    max_model_order: int = 64
    forward_tol: float = 1e-6

    def __post_init__(self):
        if self.method not in ("pencil", "lp"):
            raise ValidationError(f"unknown method {self.method!r}")
        if self.lp_grid_size is not None and self.lp_grid_size < 2:
            raise ValidationError("lp_grid_size must be >= 2")
        if (self.pencil_rank_tol <= 0 or self.coefficient_tol <= 0
                or self.forward_tol <= 0):
            raise ValidationError("tolerances must be positive")


# presolve is disabled: on the fully dense cosine constraint matrices it
# dominates the runtime by orders of magnitude without helping the solve
_LP_OPTIONS = {
    "presolve": False,
    "primal_feasibility_tolerance": 1e-9,
    "dual_feasibility_tolerance": 1e-9,
}


def recast_moments(y: MomentVector) -> RecastMoments:
    """Relabel the Chebyshev moments of y as cosine moments."""
    y_cheb = change_of_basis(y, BasisSpec("chebyshev", y.basis.N))
    return RecastMoments(y.basis.N, y_cheb.asarray())


def matrix_pencil(s: RecastMoments, opts: SolverOptions | None = None) -> np.ndarray:
    """Node locations t_m in (0, pi) from cosine moments, via the Hankel
    matrix pencil (ESPRIT shift between the top singular subspaces)."""
    opts = opts or SolverOptions()
    vals = np.asarray(s.s, dtype=complex)
    scale = np.abs(vals).max() if vals.size else 0.0
    if scale == 0.0:
        return np.array([])
    L = max(vals.size // 2, 2)
    H = scipy.linalg.hankel(vals[:L], vals[L - 1:])
    U, sigma, _ = np.linalg.svd(H, full_matrices=False)
    order = int(np.sum(sigma > opts.pencil_rank_tol * sigma[0]))
    if order == 0:
        return np.array([])
    if order > 2 * opts.max_model_order:
        raise OrderEstimationError(
            f"estimated order {order} exceeds 2 * max_model_order "
            f"= {2 * opts.max_model_order}"
        )
    if order >= L:
        raise OrderEstimationError(
            f"not enough moments to resolve order {order}"
        )
    Us = U[:, :order]
    shift, *_ = np.linalg.lstsq(Us[:-1], Us[1:], rcond=None)
    z = np.linalg.eigvals(shift)
    if np.any(np.abs(np.abs(z) - 1.0) > 0.1):
        raise IllPosedInputError(
            "pencil eigenvalues stray from the unit circle"
        )
    z = z / np.abs(z)
    t = np.angle(z)
    t = t[(t > 1e-12) & (t < math.pi - 1e-12)]
    return np.sort(t)


def solve_coefficients(locations, y: MomentVector):
    """Least-squares weights for known locations: solve [P_k(x_m)] c = y.

    Returns (weights, residual) with residual the 2-norm of the collocation
    mismatch."""
    locations = np.asarray(locations, dtype=float)
    if locations.size == 0:
        return np.array([], dtype=complex), float(
            np.linalg.norm(y.asarray())
        )
    if locations.size > y.basis.N + 1:
        raise DegenerateLocationsError("more locations than moments")
    A = basis_matrix(y.basis, locations).T  # (N+1, M)
    c, _, rank, _ = np.linalg.lstsq(A, y.asarray(), rcond=None)
    if rank < locations.size:
        raise DegenerateLocationsError("collocation matrix is rank deficient")
    residual = float(np.linalg.norm(A @ c - y.asarray()))
    return c, residual


def recover_spikes(y: MomentVector, opts: SolverOptions | None = None) -> DiracMeasure:
    """Recover a Dirac measure from its moments.

    The pencil path recasts to cosine moments, extracts nodes, and solves for
    the weights; the LP path minimizes TV on an arccos-uniform grid.  Either
    way the result must reproduce the input moments to 1e-6 relative."""
    opts = opts or SolverOptions()
    if opts.method == "lp":
        return tv_lp_recover(y, opts)
    y_cheb = change_of_basis(y, BasisSpec("chebyshev", y.basis.N))
    t = matrix_pencil(recast_moments(y), opts)
    x = np.sort(np.cos(t))
    c, _ = solve_coefficients(x, y_cheb)
    atoms = [(xi, ci) for xi, ci in zip(x, c)
             if abs(ci) >= opts.coefficient_tol]
    measure = DiracMeasure(atoms)
    _check_forward(measure, y_cheb, opts.forward_tol)
    return measure


def _check_forward(measure: DiracMeasure, y_cheb: MomentVector,
                   tol: float = 1e-6):
    from .bases import moments_of_dirac

    forward = moments_of_dirac(measure, y_cheb.basis).asarray()
    norm = np.linalg.norm(y_cheb.asarray())
    residual = np.linalg.norm(forward - y_cheb.asarray())
    if residual > tol * max(norm, 1e-12):
        raise RecoveryInconsistentError(
            f"forward-model residual {residual:.3e} exceeds "
            f"{tol:.1e} * ||y|| = {tol * norm:.3e}"
        )


def lp_grid(size: int) -> np.ndarray:
    """Grid on [-1, 1] uniform in t = arccos x, ascending in x."""
    t = np.linspace(math.pi, 0.0, size)
    return np.cos(t)


def _cluster_atoms(x: np.ndarray, c: np.ndarray, active_tol: float) -> list:
    """Merge adjacent active grid entries into single atoms by
    mass-weighted centroid."""
    active = np.where(np.abs(c) > active_tol)[0]
    atoms = []
    i = 0
    while i < active.size:
        j = i
        while j + 1 < active.size and active[j + 1] == active[j] + 1:
            j += 1
        idx = active[i: j + 1]
        mass = np.abs(c[idx])
        loc = float(np.dot(mass, x[idx]) / mass.sum())
        # grid endpoints sit at x = +-1; keep centroids inside the open
        # interval the measure model lives on
        loc = min(max(loc, -1.0 + 1e-12), 1.0 - 1e-12)
        atoms.append((loc, complex(c[idx].sum())))
        i = j + 1
    return atoms


def tv_lp_recover(y: MomentVector, opts: SolverOptions | None = None) -> DiracMeasure:
    """Discretized TV minimization: min sum(c+ + c-) s.t. A (c+ - c-) = y
    (signed mode) or min sum(c) s.t. A c = y, c >= 0 (nonnegative mode),
    on a grid uniform in t = arccos x."""
    opts = opts or SolverOptions()
    vals = y.asarray()
    if np.max(np.abs(vals.imag)) > 1e-9 * max(1.0, np.max(np.abs(vals))):
        raise ValidationError(
            "LP path requires real moments; use the pencil path for "
            "complex weights"
        )
    y_cheb = change_of_basis(y, BasisSpec("chebyshev", y.basis.N))
    b = y_cheb.asarray().real
    if np.max(np.abs(b)) == 0.0:
        return DiracMeasure([])
    N = y.basis.N
    size = opts.lp_grid_size or 16 * N + 1
    x = lp_grid(size)
    A = basis_matrix(y_cheb.basis, x).T  # (N+1, G)
    if opts.lp_nonnegative:
        A_eq = A
        nvar = size
    else:
        A_eq = np.hstack([A, -A])
        nvar = 2 * size
    res = linprog(
        c=np.ones(nvar),
        A_eq=A_eq,
        b_eq=b,
        bounds=(0, None),
        method="highs",
        options=_LP_OPTIONS,
    )
    if res.status == 2:
        raise InfeasibleError("moments are inconsistent with the grid")
    if res.status != 0:
        raise NonconvergenceError(res.message)
    sol = res.x[:size] if opts.lp_nonnegative else res.x[:size] - res.x[size:]
    active_tol = max(1e-8, 1e-10 * np.abs(sol).sum())
    return DiracMeasure(_cluster_atoms(x, sol.astype(complex), active_tol))
