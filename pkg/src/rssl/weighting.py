"""Feature selection weights from univariate feature/response association.

Raw scores are normalised into a probability vector; an all-zero score vector
falls back to uniform weights.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from rssl.errors import DataError

F_CAP = 1e12


class Scheme(str, enum.Enum):
    UNIFORM = "uniform"
    CORRELATION = "correlation"
    FSTAT = "fstat"


@dataclass(frozen=True, eq=False)
class FeatureWeights:
    weights: np.ndarray
    scheme: Scheme

    def __len__(self) -> int:
        return self.weights.shape[0]


def normalize(scores: np.ndarray, scheme: Scheme) -> FeatureWeights:
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 1 or scores.size == 0:
        raise DataError("need at least one feature score")
    if np.any(scores < 0) or not np.all(np.isfinite(scores)):
        raise DataError("feature scores must be finite and non-negative")
    total = scores.sum()
    if total > 0:
        w = scores / total
    else:
        w = np.full(scores.size, 1.0 / scores.size)
    w.setflags(write=False)
    return FeatureWeights(w, scheme)


def uniform_weights(p: int) -> FeatureWeights:
    if p < 1:
        raise DataError("p must be >= 1")
    return normalize(np.ones(p), Scheme.UNIFORM)


def _check(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise DataError("X must be n x p with len(y) == n")
    if X.shape[0] < 3:
        raise DataError(f"need n >= 3 rows to score features, got {X.shape[0]}")
    return X, y


def squared_correlations(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Squared Pearson correlation of each column with ``y``; 0 for constant columns."""
    X, y = _check(X, y)
    Xc = X - X.mean(axis=0)
    yc = y - y.mean()
    sxx = np.einsum("ij,ij->j", Xc, Xc)
    syy = yc @ yc
    sxy = yc @ Xc
    # relative threshold so that columns constant up to rounding count as constant
    scale_x = np.einsum("ij,ij->j", X, X)
    scale_y = y @ y
    ok = (sxx > 1e-24 * np.maximum(scale_x, 1e-300)) & (syy > 1e-24 * max(scale_y, 1e-300))
    r2 = np.zeros(X.shape[1])
    r2[ok] = sxy[ok] ** 2 / (sxx[ok] * syy)
    return np.clip(r2, 0.0, 1.0)


def correlation_weights(X: np.ndarray, y: np.ndarray) -> FeatureWeights:
    return normalize(squared_correlations(X, y), Scheme.CORRELATION)


def anova_f(X: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """One-way ANOVA F of each column (as response) across the two label groups."""
    X, labels = _check(X, labels)
    groups = [labels == 0.0, labels == 1.0]
    if not all(g.any() for g in groups) or not np.all(groups[0] | groups[1]):
        raise DataError("F-statistic weighting needs 0/1 labels with both classes present")
    n = X.shape[0]
    grand = X.mean(axis=0)
    ssb = np.zeros(X.shape[1])
    ssw = np.zeros(X.shape[1])
    for g in groups:
        Xg = X[g]
        mg = Xg.mean(axis=0)
        ssb += Xg.shape[0] * (mg - grand) ** 2
        ssw += ((Xg - mg) ** 2).sum(axis=0)
    msb = ssb / (len(groups) - 1)
    msw = ssw / (n - len(groups))
    tiny = 1e-24 * np.maximum(np.einsum("ij,ij->j", X, X), 1e-300)
    between = msb > tiny
    within = msw > tiny
    f = np.zeros(X.shape[1])
    both = between & within
    f[both] = msb[both] / msw[both]
    f[between & ~within] = F_CAP
    return np.minimum(f, F_CAP)


def fstat_weights_classification(X: np.ndarray, labels: np.ndarray) -> FeatureWeights:
    return normalize(anova_f(X, labels), Scheme.FSTAT)


def regression_f(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Univariate regression F = (n - 2) r^2 / (1 - r^2), capped at ``F_CAP``."""
    X, y = _check(X, y)
    r2 = squared_correlations(X, y)
    n = X.shape[0]
    f = np.full(r2.shape, F_CAP)
    below = r2 < 1.0
    f[below] = (n - 2) * r2[below] / (1.0 - r2[below])
    return np.minimum(f, F_CAP)


def fstat_weights_regression(X: np.ndarray, y: np.ndarray) -> FeatureWeights:
    return normalize(regression_f(X, y), Scheme.FSTAT)


def compute_weights(scheme: Scheme | str, X: np.ndarray, y: np.ndarray, classification: bool) -> FeatureWeights:
    """Dispatch to the weighting rule for ``scheme`` and the task kind."""
    scheme = Scheme(scheme)
    if scheme is Scheme.UNIFORM:
        return uniform_weights(np.asarray(X).shape[1])
    if scheme is Scheme.CORRELATION:
        return correlation_weights(X, y)
    if classification:
        return fstat_weights_classification(X, y)
    return fstat_weights_regression(X, y)
