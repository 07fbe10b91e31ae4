"""Scikit-learn style estimator wrappers around the recovery solvers."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .bases import MomentVector, moments_of_dirac
from .measures import eval_spline
from .solvers import SolverOptions, recover_spikes
from .splines import SplineProblem, consistency_check, recover_spline


class SpikeRecovery(BaseEstimator):
    """Recover a Dirac measure from a moment vector.

    Parameters follow SolverOptions; after fit the recovered atoms are
    available as `locations_` and `weights_` (and `measure_`).
    """

    def __init__(self, method="pencil", pencil_rank_tol=1e-8,
                 lp_grid_size=None, lp_nonnegative=False,
                 coefficient_tol=1e-8, max_model_order=64):
        self.method = method
        self.pencil_rank_tol = pencil_rank_tol
        self.lp_grid_size = lp_grid_size
        self.lp_nonnegative = lp_nonnegative
        self.coefficient_tol = coefficient_tol
        self.max_model_order = max_model_order

    def _options(self) -> SolverOptions:
        return SolverOptions(
            method=self.method,
            pencil_rank_tol=self.pencil_rank_tol,
            lp_grid_size=self.lp_grid_size,
            lp_nonnegative=self.lp_nonnegative,
            coefficient_tol=self.coefficient_tol,
            max_model_order=self.max_model_order,
        )

    def fit(self, X: MomentVector, y=None):
        if not isinstance(X, MomentVector):
            raise TypeError("X must be a MomentVector")
        self.measure_ = recover_spikes(X, self._options())
        self.locations_ = self.measure_.locations
        self.weights_ = self.measure_.weights
        forward = moments_of_dirac(self.measure_, X.basis).asarray()
        self.residual_ = float(np.linalg.norm(forward - X.asarray()))
        return self

    def _check_fitted(self):
        if not hasattr(self, "measure_"):
            raise NotFittedError("call fit first")


class SplineRecovery(BaseEstimator):
    """Recover a non-uniform spline from its polynomial projection plus
    boundary derivatives; `predict(x)` evaluates the recovered spline."""

    def __init__(self, method="pencil", pencil_rank_tol=1e-8,
                 lp_grid_size=None, coefficient_tol=1e-8,
                 max_model_order=64):
        self.method = method
        self.pencil_rank_tol = pencil_rank_tol
        self.lp_grid_size = lp_grid_size
        self.coefficient_tol = coefficient_tol
        self.max_model_order = max_model_order

    def fit(self, X: SplineProblem, y=None):
        if not isinstance(X, SplineProblem):
            raise TypeError("X must be a SplineProblem")
        opts = SolverOptions(
            method=self.method,
            pencil_rank_tol=self.pencil_rank_tol,
            lp_grid_size=self.lp_grid_size,
            coefficient_tol=self.coefficient_tol,
            max_model_order=self.max_model_order,
        )
        self.spline_ = recover_spline(X, opts)
        self.knots_ = np.array(self.spline_.knots)
        self.report_ = consistency_check(self.spline_, X)
        return self

    def predict(self, x):
        if not hasattr(self, "spline_"):
            raise NotFittedError("call fit first")
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return np.array([eval_spline(self.spline_, xi) for xi in x])
