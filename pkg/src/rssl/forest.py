"""Minimal CART random forest used as the comparison baseline."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from rssl.data import Dataset, Task
from rssl.ensemble import vote
from rssl.errors import DataError
from rssl.rngcore import Purpose, RngStream, derive
from rssl.sampling import bootstrap, draw_subset


@dataclass(frozen=True)
class ForestConfig:
    """Forest settings; ``None`` fields take the usual task-dependent defaults."""

    trees: int = 450
    mtry: int | None = None
    min_leaf: int | None = None
    max_depth: int = 30
    seed: int = 0

    def resolved(self, task: Task, p: int) -> "ForestConfig":
        classification = task is Task.CLASSIFICATION
        mtry = self.mtry or (math.ceil(math.sqrt(p)) if classification else math.ceil(p / 3))
        min_leaf = self.min_leaf or (1 if classification else 5)
        cfg = ForestConfig(self.trees, min(mtry, p), min_leaf, self.max_depth, self.seed)
        if cfg.trees < 1 or cfg.mtry < 1 or cfg.min_leaf < 1 or cfg.max_depth < 0:
            raise ValueError(f"invalid forest configuration {cfg}")
        return cfg


@dataclass(eq=False)
class TreeNode:
    """Leaf when ``feature`` is None; otherwise rows with x[feature] <= threshold go left."""

    value: float
    n: int
    impurity: float
    feature: int | None = None
    threshold: float = math.nan
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    def depth(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + max(self.left.depth(), self.right.depth())


def _impurity(y: np.ndarray, classification: bool) -> float:
    """Node impurity times node size (SSE, or n * Gini)."""
    n = y.shape[0]
    if classification:
        ones = y.sum()
        return float(n - (ones**2 + (n - ones) ** 2) / n)
    return float(((y - y.mean()) ** 2).sum())


def _leaf_value(y: np.ndarray, classification: bool) -> float:
    if classification:
        return 1.0 if y.sum() * 2 > y.shape[0] else 0.0
    return float(y.mean())


def _best_split(Xn: np.ndarray, yn: np.ndarray, min_leaf: int, classification: bool):
    """Best (column, threshold, child impurity) over the columns of ``Xn``.

    Ties go to the lowest column, then the lowest threshold.
    """
    n, k = Xn.shape
    order = np.argsort(Xn, axis=0, kind="stable")
    xs = np.take_along_axis(Xn, order, axis=0)
    ys = yn[order]
    n_left = np.arange(1, n)[:, None].astype(np.float64)
    n_right = n - n_left
    s = np.cumsum(ys, axis=0)[:-1]
    total = ys[:, 0].sum()
    if classification:
        r = total - s
        child = (n_left - (s**2 + (n_left - s) ** 2) / n_left) + (
            n_right - (r**2 + (n_right - r) ** 2) / n_right
        )
    else:
        s2 = np.cumsum(ys**2, axis=0)[:-1]
        total2 = (ys[:, 0] ** 2).sum()
        child = (s2 - s**2 / n_left) + ((total2 - s2) - (total - s) ** 2 / n_right)
    valid = (xs[:-1] < xs[1:]) & (n_left >= min_leaf) & (n_right >= min_leaf)
    child = np.where(valid, child, np.inf)
    flat = int(np.argmin(child.T))
    col, pos = divmod(flat, n - 1)
    best = float(child[pos, col])
    if not np.isfinite(best):
        return None
    lo, hi = xs[pos, col], xs[pos + 1, col]
    threshold = 0.5 * (lo + hi)
    if not lo <= threshold < hi:
        threshold = lo
    return col, float(threshold), max(best, 0.0)


def fit_tree(
    X: np.ndarray,
    y: np.ndarray,
    config: ForestConfig,
    rng: RngStream,
    classification: bool,
) -> TreeNode:
    """Grow one CART tree; ``config`` must already be resolved (see ForestConfig.resolved)."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.shape[0] < 1:
        raise DataError("cannot grow a tree on zero rows")
    p = X.shape[1]
    uniform = np.full(p, 1.0 / p)

    def grow(rows: np.ndarray, depth: int) -> TreeNode:
        yn = y[rows]
        imp = _impurity(yn, classification)
        node = TreeNode(_leaf_value(yn, classification), rows.size, imp)
        if imp <= 0.0 or depth >= config.max_depth or rows.size < 2 * config.min_leaf:
            return node
        feats = draw_subset(uniform, config.mtry, rng)
        found = _best_split(X[np.ix_(rows, feats)], yn, config.min_leaf, classification)
        if found is None:
            return node
        col, threshold, child_imp = found
        if not child_imp < imp * (1.0 - 1e-10):
            return node
        feature = int(feats[col])
        go_left = X[rows, feature] <= threshold
        node.feature, node.threshold = feature, threshold
        node.left = grow(rows[go_left], depth + 1)
        node.right = grow(rows[~go_left], depth + 1)
        return node

    return grow(np.arange(X.shape[0]), 0)


class CompiledTree:
    """Array form of a tree for vectorised prediction."""

    def __init__(self, root: TreeNode):
        feature, threshold, left, right, value = [], [], [], [], []

        def add(node: TreeNode) -> int:
            i = len(feature)
            feature.append(-1 if node.is_leaf else node.feature)
            threshold.append(node.threshold)
            value.append(node.value)
            left.append(-1)
            right.append(-1)
            if not node.is_leaf:
                left[i] = add(node.left)
                right[i] = add(node.right)
            return i

        add(root)
        self.root = root
        self.feature = np.array(feature, dtype=np.int64)
        self.threshold = np.array(threshold)
        self.left = np.array(left, dtype=np.int64)
        self.right = np.array(right, dtype=np.int64)
        self.value = np.array(value)

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        node = np.zeros(X.shape[0], dtype=np.int64)
        while True:
            active = np.flatnonzero(self.feature[node] >= 0)
            if active.size == 0:
                return self.value[node]
            at = node[active]
            go_left = X[active, self.feature[at]] <= self.threshold[at]
            node[active] = np.where(go_left, self.left[at], self.right[at])


@dataclass(frozen=True, eq=False)
class ForestModel:
    trees: tuple[CompiledTree, ...]
    task: Task
    config: ForestConfig

    def tree_predictions(self, X) -> np.ndarray:
        """Shape ``(rows, trees)``."""
        return np.stack([t.predict(X) for t in self.trees], axis=-1)


def fit_forest(train: Dataset, config: ForestConfig, stream_prefix: Sequence[int] = ()) -> ForestModel:
    """Each tree grows on its own bootstrap with streams ``(seed; *prefix, t, purpose)``."""
    cfg = config.resolved(train.task, train.p)
    classification = train.task is Task.CLASSIFICATION
    prefix = tuple(int(v) for v in stream_prefix)
    trees = []
    for t in range(cfg.trees):
        rows = bootstrap(train.n, derive(cfg.seed, (*prefix, t, Purpose.BOOTSTRAP)))
        root = fit_tree(
            train.features[rows],
            train.target[rows],
            cfg,
            derive(cfg.seed, (*prefix, t, Purpose.TREE)),
            classification,
        )
        trees.append(CompiledTree(root))
    return ForestModel(tuple(trees), train.task, cfg)


def predict_forest(model: ForestModel, x) -> float | int | np.ndarray:
    """Mean tree output (regression) or majority vote with ties going to class 0."""
    single = np.ndim(x) == 1
    votes = model.tree_predictions(np.atleast_2d(x))
    if model.task is Task.CLASSIFICATION:
        out = vote(votes.astype(np.int64), 0.0).astype(np.int64)
        return int(out[0]) if single else out
    out = votes.mean(axis=-1)
    return float(out[0]) if single else out
