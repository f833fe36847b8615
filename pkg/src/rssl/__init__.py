"""Adaptive random subspace learning with linear and logistic base learners."""

from rssl.data import Dataset, Task, TrainTestSplit, load_csv, split, write_csv
from rssl.ensemble import EnsembleModel, RsslConfig, train_rssl
from rssl.learners import FitConfig, fit_logistic, fit_ols
from rssl.rngcore import RngStream, derive
from rssl.synthetic import ScenarioConfig, generate, scenario_grid
from rssl.weighting import FeatureWeights, Scheme

__all__ = [
    "Dataset",
    "EnsembleModel",
    "FeatureWeights",
    "FitConfig",
    "RngStream",
    "RsslConfig",
    "ScenarioConfig",
    "Scheme",
    "Task",
    "TrainTestSplit",
    "derive",
    "fit_logistic",
    "fit_ols",
    "generate",
    "load_csv",
    "scenario_grid",
    "split",
    "train_rssl",
    "write_csv",
]

__version__ = "0.1.0"
