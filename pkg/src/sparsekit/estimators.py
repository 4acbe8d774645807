"""Scikit-learn style estimators wrapping the l1 recovery programs.

Each estimator follows the fit/predict contract: ``fit(X, y)`` solves the
program for the coefficient vector and stores it as ``coef_``;
``predict(X)`` is the linear model ``X @ coef_``.  Hyperparameters live in
``__init__`` under their own names, so ``get_params`` / ``set_params`` /
``clone`` and pipeline composition work as usual.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.exceptions import NotFittedError

from . import solvers
from .lp import SolverOptions
from .validation import check_matrix, check_matrix_vector


class _L1Estimator(BaseEstimator, RegressorMixin):
    """Shared fit/predict plumbing; subclasses provide _solve."""

    def _options(self):
        return SolverOptions(
            feasibility_tol=self.feasibility_tol,
            optimality_tol=self.optimality_tol,
            max_iterations=self.max_iterations,
        )

    def fit(self, X, y):
        X, y = check_matrix_vector(X, y)
        result = self._solve(X, y)
        self.coef_ = result.gamma_hat
        self.result_ = result
        self.n_iter_ = result.iterations
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        if not hasattr(self, "coef_"):
            raise NotFittedError(
                f"{type(self).__name__} is not fitted yet; call fit first"
            )
        X = check_matrix(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, fit saw {self.n_features_in_}"
            )
        return X @ self.coef_


class BasisPursuit(_L1Estimator):
    """Minimum-l1 interpolator: min ||coef||_1 s.t. X coef = y."""

    def __init__(self, feasibility_tol=1e-9, optimality_tol=1e-9, max_iterations=50_000):
        self.feasibility_tol = feasibility_tol
        self.optimality_tol = optimality_tol
        self.max_iterations = max_iterations

    def _solve(self, X, y):
        return solvers.basis_pursuit(X, y, self._options())


class DantzigSelector(_L1Estimator):
    """min ||coef||_1 s.t. ||X^T (y - X coef)||_inf <= lam."""

    def __init__(self, lam=0.1, feasibility_tol=1e-9, optimality_tol=1e-9,
                 max_iterations=50_000):
        self.lam = lam
        self.feasibility_tol = feasibility_tol
        self.optimality_tol = optimality_tol
        self.max_iterations = max_iterations

    def _solve(self, X, y):
        return solvers.dantzig_selector(X, y, self.lam, self._options())


class L2ConstrainedL1(_L1Estimator):
    """min ||coef||_1 s.t. ||y - X coef||_2 <= eta."""

    def __init__(self, eta=0.1, feasibility_tol=1e-9, optimality_tol=1e-9,
                 max_iterations=50_000):
        self.eta = eta
        self.feasibility_tol = feasibility_tol
        self.optimality_tol = optimality_tol
        self.max_iterations = max_iterations

    def _solve(self, X, y):
        return solvers.l2_constrained_l1(X, y, self.eta, self._options())


class Lasso(_L1Estimator):
    """min ||y - X coef||_2^2 + rho ||coef||_1 (no 1/2 on the quadratic)."""

    def __init__(self, rho=0.1, feasibility_tol=1e-9, optimality_tol=1e-9,
                 max_iterations=50_000):
        self.rho = rho
        self.feasibility_tol = feasibility_tol
        self.optimality_tol = optimality_tol
        self.max_iterations = max_iterations

    def _solve(self, X, y):
        return solvers.lasso(X, y, self.rho, self._options())
