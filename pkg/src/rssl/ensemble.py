"""Random subspace ensembles with importance-weighted feature draws.

Training computes one weight vector on the full training set, then for each
member draws a bootstrap of the rows and a weighted feature subset and fits the
task's base learner on that slice.  Members are aggregated with equal weight:
mean prediction for regression, majority vote for classification.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from rssl.data import Dataset, Task
from rssl.errors import DataError, NumericalError
from rssl.learners import FitConfig, LinearModel, LogisticModel, fit_logistic, fit_ols
from rssl.rngcore import Purpose, derive
from rssl.sampling import bootstrap, draw_subset
from rssl.weighting import FeatureWeights, Scheme, compute_weights

AUTO = "auto"


@dataclass(frozen=True)
class RsslConfig:
    learners: int = 450
    subset_size: int | str = AUTO
    weighting: Scheme = Scheme.CORRELATION
    task: Task = Task.REGRESSION
    fit: FitConfig = field(default_factory=FitConfig)
    seed: int = 0
    max_attempts: int = 20
    # test hook: fit every member on the training rows as given
    no_resample: bool = False

    def __post_init__(self):
        object.__setattr__(self, "weighting", Scheme(self.weighting))
        object.__setattr__(self, "task", Task.parse(self.task))
        if self.learners < 1:
            raise ValueError("learners must be >= 1")
        if self.subset_size != AUTO and (not isinstance(self.subset_size, int) or self.subset_size < 1):
            raise ValueError(f"subset_size must be a positive int or 'auto', got {self.subset_size!r}")


def resolve_subset_size(subset_size: int | str, n: int, p: int) -> int:
    """``auto`` is ceil(sqrt(p)) capped at n - 2 (and p), never below 1."""
    if subset_size == AUTO:
        return max(1, min(math.ceil(math.sqrt(p)), n - 2, p))
    d = int(subset_size)
    if not 1 <= d <= p:
        raise DataError(f"subset size {d} must be in [1, p={p}]")
    return d


@dataclass(frozen=True, eq=False)
class Member:
    subset: np.ndarray
    model: LinearModel


@dataclass(frozen=True, eq=False)
class EnsembleModel:
    members: tuple[Member, ...]
    task: Task
    weights_used: FeatureWeights
    subset_size: int
    seed: int = 0

    @property
    def n_members(self) -> int:
        return len(self.members)

    def member_decisions(self, X) -> np.ndarray:
        """Linear predictor of every member, shape ``(rows, L)`` (or ``(L,)`` for one row)."""
        X = np.asarray(X, dtype=np.float64)
        return np.stack([m.model.decision(X) for m in self.members], axis=-1)

    def permuted(self, order: Sequence[int]) -> "EnsembleModel":
        return EnsembleModel(
            tuple(self.members[i] for i in order), self.task, self.weights_used, self.subset_size, self.seed
        )

    def to_json(self) -> str:
        doc = {
            "task": self.task.value,
            "L": self.n_members,
            "d": self.subset_size,
            "weighting": self.weights_used.scheme.value,
            "seed": self.seed,
            "weights_used": self.weights_used.weights.tolist(),
            "members": [_member_doc(m) for m in self.members],
        }
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "EnsembleModel":
        doc = json.loads(text)
        task = Task.parse(doc["task"])
        members = []
        for md in doc["members"]:
            subset = np.asarray(md["subset"], dtype=np.int64)
            coef = np.asarray(md["coefficients"], dtype=np.float64)
            if task is Task.CLASSIFICATION:
                model = LogisticModel(md["intercept"], coef, subset, md["converged"], md["iterations"])
            else:
                model = LinearModel(md["intercept"], coef, subset)
            members.append(Member(subset, model))
        weights = np.asarray(doc["weights_used"], dtype=np.float64)
        weights.setflags(write=False)
        return cls(tuple(members), task, FeatureWeights(weights, Scheme(doc["weighting"])), doc["d"], doc["seed"])


def _member_doc(m: Member) -> dict:
    # json writes floats with repr, the shortest string that round-trips exactly
    out = {
        "subset": m.subset.tolist(),
        "intercept": float(m.model.intercept),
        "coefficients": m.model.coefficients.tolist(),
    }
    if isinstance(m.model, LogisticModel):
        out["converged"] = bool(m.model.converged)
        out["iterations"] = int(m.model.iterations)
    return out


def _fit_member(
    l: int,
    train: Dataset,
    config: RsslConfig,
    weights: FeatureWeights,
    d: int,
    prefix: tuple[int, ...],
) -> Member:
    subset = draw_subset(weights, d, derive(config.seed, (*prefix, l, Purpose.SUBSET)))
    boot_rng = derive(config.seed, (*prefix, l, Purpose.BOOTSTRAP))
    classification = train.task is Task.CLASSIFICATION
    for _ in range(config.max_attempts):
        rows = np.arange(train.n) if config.no_resample else bootstrap(train.n, boot_rng)
        y = train.target[rows]
        if classification and y.min() == y.max():
            if config.no_resample:
                break
            continue
        X = train.features[np.ix_(rows, subset)]
        if classification:
            model = fit_logistic(X, y, config.fit, feature_indices=subset)
        else:
            model = fit_ols(X, y, config.fit, feature_indices=subset)
        return Member(subset, model)
    raise NumericalError(f"member {l}: every bootstrap replicate held a single class")


def train_rssl(
    train: Dataset,
    config: RsslConfig,
    stream_prefix: Sequence[int] = (),
    threads: int = 1,
) -> EnsembleModel:
    """Fit an ensemble of ``config.learners`` members on ``train``.

    Member ``l`` draws from the streams ``(seed; *stream_prefix, l, purpose)``,
    so the result does not depend on ``threads``.
    """
    if train.task is not config.task:
        raise DataError(f"dataset task {train.task.value} != config task {config.task.value}")
    d = resolve_subset_size(config.subset_size, train.n, train.p)
    classification = train.task is Task.CLASSIFICATION
    if classification and np.unique(train.target).size < 2:
        raise DataError("classification training set holds a single class")
    if config.weighting is Scheme.UNIFORM or train.n < 3:
        weights = compute_weights(Scheme.UNIFORM, train.features, train.target, classification)
    else:
        weights = compute_weights(config.weighting, train.features, train.target, classification)
    prefix = tuple(int(v) for v in stream_prefix)

    def fit(l: int) -> Member:
        return _fit_member(l, train, config, weights, d, prefix)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            members = tuple(pool.map(fit, range(config.learners)))
    else:
        members = tuple(fit(l) for l in range(config.learners))
    return EnsembleModel(members, train.task, weights, d, config.seed)


def _require(model: EnsembleModel, task: Task) -> None:
    if model.task is not task:
        raise DataError(f"ensemble was trained for {model.task.value}, not {task.value}")


def predict_regression(model: EnsembleModel, x) -> float | np.ndarray:
    """Mean of the member predictions."""
    _require(model, Task.REGRESSION)
    out = model.member_decisions(x).mean(axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def predict_proba_ensemble(model: EnsembleModel, x) -> float | np.ndarray:
    _require(model, Task.CLASSIFICATION)
    eta = model.member_decisions(x)
    out = np.exp(-np.logaddexp(0.0, -eta)).mean(axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def vote(member_classes: np.ndarray, mean_proba: np.ndarray | float) -> np.ndarray:
    """Majority vote over the last axis.

    A tied vote goes to class 1 only if the mean member probability is strictly
    above 0.5.
    """
    member_classes = np.asarray(member_classes)
    L = member_classes.shape[-1]
    ones = 2 * member_classes.sum(axis=-1)
    return np.where(ones > L, 1, np.where(ones < L, 0, (np.asarray(mean_proba) > 0.5).astype(np.int64)))


def predict_class(model: EnsembleModel, x) -> int | np.ndarray:
    _require(model, Task.CLASSIFICATION)
    eta = model.member_decisions(x)
    proba = np.exp(-np.logaddexp(0.0, -eta))
    out = vote((proba >= 0.5).astype(np.int64), proba.mean(axis=-1))
    return int(out) if np.ndim(out) == 0 else out.astype(np.int64)
