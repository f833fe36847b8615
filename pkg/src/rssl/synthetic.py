"""Synthetic regression/classification scenarios with equicorrelated Gaussian features."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from rssl.data import Dataset, Task
from rssl.errors import DataError, NumericalError
from rssl.rngcore import Purpose, derive

MAX_ATTEMPTS = 20
TRAIN, TEST = 0, 1


@dataclass(frozen=True)
class ScenarioConfig:
    n: int
    p: int
    rho: float
    task: Task = Task.REGRESSION
    seed: int = 0
    k_true: int | None = None  # None -> min(10, p)
    noise_sd: float = 1.0
    test_size: int = 1000

    def __post_init__(self):
        object.__setattr__(self, "task", Task.parse(self.task))
        if self.k_true is None:
            object.__setattr__(self, "k_true", min(10, self.p))
        if self.n < 1 or self.p < 1 or self.test_size < 1:
            raise DataError("n, p and test_size must be >= 1")
        if not 0.0 <= self.rho < 1.0:
            raise DataError(f"rho must be in [0, 1), got {self.rho}")
        if not 1 <= self.k_true <= self.p:
            raise DataError(f"k_true must be in [1, p], got {self.k_true}")
        if not self.noise_sd >= 0.0:
            raise DataError("noise_sd must be >= 0")

    @property
    def name(self) -> str:
        return f"{self.task.value}-n{self.n}-p{self.p}-rho{self.rho:g}"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["task"] = self.task.value
        return d

    def with_seed(self, seed: int) -> "ScenarioConfig":
        return replace(self, seed=seed)


def true_beta(config: ScenarioConfig) -> np.ndarray:
    beta = np.zeros(config.p)
    beta[: config.k_true] = 1.0
    return beta


def equicorrelated(rows: int, p: int, rho: float, rng) -> np.ndarray:
    """Rows ~ N(0, (1 - rho) I + rho J) via one shared factor per row."""
    shared = rng.gaussians(rows)
    own = rng.gaussians(rows * p).reshape(rows, p)
    return math.sqrt(rho) * shared[:, None] + math.sqrt(1.0 - rho) * own


def _draw(config: ScenarioConfig, rows: int, part: int, replication: int) -> Dataset:
    beta = true_beta(config)
    for attempt in range(MAX_ATTEMPTS):
        rng = derive(config.seed, (replication, Purpose.GENERATE, part, attempt))
        X = equicorrelated(rows, config.p, config.rho, rng)
        signal = X @ beta
        if config.task is Task.REGRESSION:
            y = signal + config.noise_sd * rng.gaussians(rows)
            return Dataset(X, y, config.task)
        y = (rng.uniforms(rows) < 1.0 / (1.0 + np.exp(-signal))).astype(np.float64)
        if part == TEST or rows < 2 or 0.0 < y.mean() < 1.0:
            return Dataset(X, y, config.task)
    raise NumericalError(f"{config.name}: no two-class training sample in {MAX_ATTEMPTS} attempts")


def generate(config: ScenarioConfig, replication: int = 0) -> tuple[Dataset, Dataset]:
    """Independent train (n rows) and test (test_size rows) draws for one replication."""
    return (
        _draw(config, config.n, TRAIN, replication),
        _draw(config, config.test_size, TEST, replication),
    )


REGRESSION_GRID = [
    (200, 25, 0.05),
    (200, 25, 0.5),
    (25, 200, 0.05),
    (25, 200, 0.5),
    (50, 1000, 0.05),
    (1000, 50, 0.05),
]
CLASSIFICATION_GRID = [
    (200, 25, 0.05),
    (200, 25, 0.5),
    (50, 200, 0.05),
    (50, 200, 0.5),
    (50, 1000, 0.05),
    (1000, 50, 0.05),
]


def scenario_grid(task: Task | str | None = None, seed: int = 0) -> list[ScenarioConfig]:
    """The twelve benchmark scenarios (six per task), optionally filtered by task."""
    grid = [ScenarioConfig(n, p, rho, Task.REGRESSION, seed) for n, p, rho in REGRESSION_GRID]
    grid += [ScenarioConfig(n, p, rho, Task.CLASSIFICATION, seed) for n, p, rho in CLASSIFICATION_GRID]
    if task is not None:
        task = Task.parse(task)
        grid = [s for s in grid if s.task is task]
    return grid
