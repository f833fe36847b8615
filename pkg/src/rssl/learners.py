"""Base learners: least-squares linear regression and ridge-stabilised logistic IRLS."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from rssl.errors import DataError

PROB_CLIP = 1e-12


@dataclass(frozen=True)
class FitConfig:
    ridge_jitter: float = 1e-6
    max_iter: int = 100
    tol: float = 1e-8
    svd_rcond: float = 1e-10
    max_halvings: int = 30

    def __post_init__(self):
        if self.ridge_jitter < 0:
            raise ValueError("ridge_jitter must be >= 0")
        if self.max_iter < 1 or self.max_halvings < 0:
            raise ValueError("max_iter must be >= 1")
        if self.tol <= 0 or self.svd_rcond <= 0:
            raise ValueError("tol and svd_rcond must be > 0")


@dataclass(frozen=True, eq=False)
class LinearModel:
    intercept: float
    coefficients: np.ndarray
    feature_indices: np.ndarray

    def decision(self, X: np.ndarray) -> np.ndarray:
        """Linear predictor for the rows of a full-width matrix ``X``."""
        X = np.asarray(X, dtype=np.float64)
        return self.intercept + X[..., self.feature_indices] @ self.coefficients


@dataclass(frozen=True, eq=False)
class LogisticModel(LinearModel):
    converged: bool = False
    iterations: int = 0


def _design(X_sub, y) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X_sub, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[0] == 0 or X.shape[1] == 0:
        raise DataError("need a non-empty m x d design")
    if X.shape[0] != y.shape[0]:
        raise DataError("design and response lengths differ")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise DataError("non-finite values in design or response")
    return np.column_stack([np.ones(X.shape[0]), X]), y


def _indices(feature_indices, d: int) -> np.ndarray:
    if feature_indices is None:
        return np.arange(d, dtype=np.int64)
    idx = np.asarray(feature_indices, dtype=np.int64)
    if idx.shape != (d,):
        raise DataError("feature_indices must have one entry per column")
    return idx


def fit_ols(X_sub, y, config: FitConfig = FitConfig(), feature_indices=None) -> LinearModel:
    """Minimum-norm least squares of ``y`` on ``[1 | X_sub]`` via SVD.

    Singular values below ``svd_rcond * sigma_max`` are dropped, so
    rank-deficient and wide designs get the minimum-norm solution.
    """
    A, y = _design(X_sub, y)
    theta, *_ = np.linalg.lstsq(A, y, rcond=config.svd_rcond)
    return LinearModel(float(theta[0]), theta[1:], _indices(feature_indices, A.shape[1] - 1))


def predict_linear(model: LinearModel, x) -> float | np.ndarray:
    out = model.decision(x)
    return float(out) if np.ndim(out) == 0 else out


def _sigmoid(eta):
    return np.exp(-np.logaddexp(0.0, -eta))


def penalized_loglik(theta: np.ndarray, A: np.ndarray, y: np.ndarray, ridge: float) -> float:
    """Bernoulli log-likelihood minus ``ridge/2 * ||slopes||^2`` (intercept first)."""
    eta = A @ theta
    ll = y @ eta - np.logaddexp(0.0, eta).sum()
    return float(ll - 0.5 * ridge * theta[1:] @ theta[1:])


def penalized_gradient(theta: np.ndarray, A: np.ndarray, y: np.ndarray, ridge: float) -> np.ndarray:
    g = A.T @ (y - _sigmoid(A @ theta))
    g[1:] -= ridge * theta[1:]
    return g


def fit_logistic(X_sub, labels, config: FitConfig = FitConfig(), feature_indices=None) -> LogisticModel:
    """Logistic regression by IRLS (Newton) with step halving.

    Maximises the penalised log-likelihood with an unpenalised intercept.
    Converged when an accepted step improves the objective by less than
    ``config.tol``.
    """
    A, y = _design(X_sub, labels)
    if not np.all((y == 0.0) | (y == 1.0)):
        raise DataError("logistic labels must be 0/1")
    if A.shape[0] < 2 or y.min() == y.max():
        raise DataError("degenerate labels: both classes are required")
    k = A.shape[1]
    penalty = np.full(k, config.ridge_jitter)
    penalty[0] = 0.0
    lam = config.ridge_jitter

    theta = np.zeros(k)
    theta[0] = np.log(y.mean() / (1.0 - y.mean()))
    obj = penalized_loglik(theta, A, y, lam)
    converged = False
    it = 0
    while it < config.max_iter:
        it += 1
        eta = A @ theta
        prob = np.clip(_sigmoid(eta), PROB_CLIP, 1.0 - PROB_CLIP)
        w = prob * (1.0 - prob)
        grad = A.T @ (y - _sigmoid(eta)) - penalty * theta
        H = (A.T * w) @ A + np.diag(penalty)
        try:
            step = np.linalg.solve(H, grad)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(H, grad, rcond=None)[0]
        scale = 1.0
        for _ in range(config.max_halvings + 1):
            cand = theta + scale * step
            cand_obj = penalized_loglik(cand, A, y, lam)
            if cand_obj >= obj:
                break
            scale *= 0.5
        else:
            # no ascent along the Newton direction: at the optimum to machine precision
            converged = True
            break
        gain = cand_obj - obj
        theta, obj = cand, cand_obj
        if gain < config.tol:
            converged = True
            break
    return LogisticModel(
        float(theta[0]),
        theta[1:],
        _indices(feature_indices, k - 1),
        converged=converged,
        iterations=it,
    )


def predict_proba(model: LinearModel, x) -> float | np.ndarray:
    out = _sigmoid(model.decision(x))
    return float(out) if np.ndim(out) == 0 else out


def predict_class(model: LinearModel, x) -> int | np.ndarray:
    """Class 1 iff the fitted probability is at least 0.5."""
    prob = predict_proba(model, x)
    if np.ndim(prob) == 0:
        return int(prob >= 0.5)
    return (prob >= 0.5).astype(np.int64)
