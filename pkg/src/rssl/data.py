"""Datasets, CSV ingestion and train/test splitting."""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from rssl.errors import DataError
from rssl.rngcore import RngStream


class Task(str, enum.Enum):
    REGRESSION = "regression"
    CLASSIFICATION = "classification"

    @classmethod
    def parse(cls, value: "Task | str") -> "Task":
        if isinstance(value, Task):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise DataError(f"unknown task {value!r}") from None


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    """Numeric feature matrix plus target.

    Classification targets are stored as 0.0/1.0; ``class_labels`` keeps the raw
    labels they were mapped from (ascending order), when known.
    """

    features: np.ndarray
    target: np.ndarray
    task: Task
    feature_names: tuple[str, ...] = ()
    target_name: str = "y"
    class_labels: tuple[str, str] | None = None

    def __post_init__(self):
        X = np.asarray(self.features, dtype=np.float64)
        if X.ndim != 2:
            raise DataError("features must be a 2-d matrix")
        n, p = X.shape
        y = np.asarray(self.target, dtype=np.float64).reshape(-1)
        if n < 1 or p < 1:
            raise DataError(f"dataset needs n >= 1 and p >= 1, got {n}x{p}")
        if y.shape[0] != n:
            raise DataError(f"target length {y.shape[0]} != {n} rows")
        if not np.all(np.isfinite(X)):
            raise DataError("features contain NaN or Inf")
        if not np.all(np.isfinite(y)):
            raise DataError("target contains NaN or Inf")
        task = Task.parse(self.task)
        if task is Task.CLASSIFICATION and not np.all((y == 0.0) | (y == 1.0)):
            raise DataError("classification targets must be 0/1")
        names = tuple(self.feature_names) or tuple(f"x{j}" for j in range(p))
        if len(names) != p:
            raise DataError(f"{len(names)} feature names for {p} columns")
        object.__setattr__(self, "features", _frozen(X))
        object.__setattr__(self, "target", _frozen(y))
        object.__setattr__(self, "task", task)
        object.__setattr__(self, "feature_names", names)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def p(self) -> int:
        return self.features.shape[1]

    def rows(self, idx: Sequence[int] | np.ndarray) -> "Dataset":
        idx = np.asarray(idx, dtype=np.int64)
        return Dataset(
            self.features[idx],
            self.target[idx],
            self.task,
            self.feature_names,
            self.target_name,
            self.class_labels,
        )

    def same_contents(self, other: "Dataset") -> bool:
        return (
            self.task is other.task
            and self.feature_names == other.feature_names
            and np.array_equal(self.features, other.features)
            and np.array_equal(self.target, other.target)
        )


@dataclass(frozen=True)
class TrainTestSplit:
    train_indices: np.ndarray
    test_indices: np.ndarray = field(repr=False)


def _parse_float(cell: str) -> float | None:
    try:
        return float(cell)
    except ValueError:
        return None


def _label_order(labels: set[str]) -> list[str]:
    as_numbers = {lab: _parse_float(lab) for lab in labels}
    if all(v is not None for v in as_numbers.values()):
        return sorted(labels, key=lambda lab: (as_numbers[lab], lab))
    return sorted(labels)


def load_csv(path: str | Path, target_name: str, task: Task | str) -> Dataset:
    """Read a header-first, comma-separated numeric table.

    Classification labels may be any two distinct strings; they are mapped to
    0/1 in ascending order (numeric order when every label parses as a number).
    """
    task = Task.parse(task)
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise DataError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    if not body:
        raise DataError(f"{path}: no data rows")
    hits = [j for j, h in enumerate(header) if h == target_name]
    if not hits:
        raise DataError(f"{path}: target column {target_name!r} not in header")
    if len(hits) > 1:
        raise DataError(f"{path}: duplicate target column {target_name!r}")
    t = hits[0]
    names = [h for j, h in enumerate(header) if j != t]
    X = np.empty((len(body), len(names)))
    raw_target = []
    for i, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise DataError(f"{path}:{i}: expected {len(header)} cells, got {len(row)}")
        k = 0
        for j, cell in enumerate(row):
            cell = cell.strip()
            if j == t:
                raw_target.append(cell)
                continue
            if cell == "":
                raise DataError(f"{path}:{i}: missing value in column {header[j]!r}")
            v = _parse_float(cell)
            if v is None:
                raise DataError(f"{path}:{i}: non-numeric feature {header[j]!r} value {cell!r}")
            X[i - 2, k] = v
            k += 1
    if any(c == "" for c in raw_target):
        raise DataError(f"{path}: missing target value")

    labels = None
    if task is Task.CLASSIFICATION:
        distinct = set(raw_target)
        if len(distinct) > 2:
            raise DataError(f"{path}: {len(distinct)} distinct labels; only binary targets are supported")
        order = _label_order(distinct)
        code = {lab: float(c) for c, lab in enumerate(order)}
        y = np.array([code[c] for c in raw_target])
        if len(order) == 2:
            labels = (order[0], order[1])
    else:
        vals = [_parse_float(c) for c in raw_target]
        if any(v is None for v in vals):
            raise DataError(f"{path}: non-numeric regression target")
        y = np.array(vals, dtype=np.float64)
    return Dataset(X, y, task, tuple(names), target_name, labels)


def write_csv(dataset: Dataset, path: str | Path) -> None:
    """Write ``dataset`` so that :func:`load_csv` reads it back unchanged."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([*dataset.feature_names, dataset.target_name])
        for x, y in zip(dataset.features, dataset.target):
            if dataset.task is Task.CLASSIFICATION:
                target = dataset.class_labels[int(y)] if dataset.class_labels else str(int(y))
            else:
                target = repr(float(y))
            w.writerow([*(repr(float(v)) for v in x), target])


def _n_train(total: int, fraction: float) -> int:
    return min(max(int(math.floor(fraction * total + 0.5)), 1), total - 1)


def _permutation(n: int, rng: RngStream) -> np.ndarray:
    return np.argsort(rng.uniforms(n), kind="stable")


def split(dataset: Dataset, train_fraction: float, rng: RngStream) -> TrainTestSplit:
    """Random train/test partition; stratified by class for classification."""
    if not 0.0 < train_fraction < 1.0:
        raise DataError(f"train_fraction must be in (0, 1), got {train_fraction}")
    n = dataset.n
    if dataset.task is Task.CLASSIFICATION:
        groups = [np.flatnonzero(dataset.target == c) for c in (0.0, 1.0)]
        if any(g.size < 2 for g in groups):
            raise DataError("stratified split needs at least 2 rows of each class")
    else:
        if n < 2:
            raise DataError("split needs at least 2 rows")
        groups = [np.arange(n)]
    train, test = [], []
    for g in groups:
        perm = g[_permutation(g.size, rng)]
        k = _n_train(g.size, train_fraction)
        train.append(perm[:k])
        test.append(perm[k:])
    return TrainTestSplit(np.sort(np.concatenate(train)), np.sort(np.concatenate(test)))
