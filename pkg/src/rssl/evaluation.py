"""Loss metrics, the replicated-split average test error protocol and result tables."""

from __future__ import annotations

import enum
import io
import csv
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from rssl import ensemble as ens
from rssl.data import Dataset, Task, split
from rssl.errors import DataError
from rssl.forest import ForestConfig, fit_forest, predict_forest
from rssl.learners import FitConfig, fit_logistic, fit_ols, predict_class, predict_linear
from rssl.rngcore import Purpose, derive
from rssl.synthetic import ScenarioConfig, generate
from rssl.weighting import Scheme, compute_weights

SCHEMA_VERSION = "1"


def mse(predictions, truth) -> float:
    a = np.asarray(predictions, dtype=np.float64).reshape(-1)
    b = np.asarray(truth, dtype=np.float64).reshape(-1)
    if a.shape != b.shape or a.size == 0:
        raise DataError("mse needs equal, non-zero lengths")
    return float(np.mean((a - b) ** 2))


def mcr(predictions, truth) -> float:
    a = np.asarray(predictions).reshape(-1)
    b = np.asarray(truth).reshape(-1)
    if a.shape != b.shape or a.size == 0:
        raise DataError("mcr needs equal, non-zero lengths")
    return float(np.mean(a != b))


def task_loss(task: Task) -> Callable[[np.ndarray, np.ndarray], float]:
    return mse if task is Task.REGRESSION else mcr


class MethodId(str, enum.Enum):
    SINGLE = "single"
    UNIFORM = "uniform"
    ADAPTIVE_CORR = "adaptive-corr"
    ADAPTIVE_FSTAT = "adaptive-fstat"
    FOREST = "rf"

    @property
    def code(self) -> int:
        return list(MethodId).index(self) + 1

    @property
    def adaptive(self) -> bool:
        return self in (MethodId.ADAPTIVE_CORR, MethodId.ADAPTIVE_FSTAT)


ADAPTIVE_SCHEME = {MethodId.ADAPTIVE_CORR: Scheme.CORRELATION, MethodId.ADAPTIVE_FSTAT: Scheme.FSTAT}


@dataclass(frozen=True)
class BenchSettings:
    learners: int = 450
    subset_size: int | str = ens.AUTO
    fit: FitConfig = field(default_factory=FitConfig)
    forest: ForestConfig = field(default_factory=ForestConfig)
    replications: int = 100
    split: float = 0.7
    threads: int = 1

    def to_dict(self) -> dict:
        # threads is left out on purpose: it never changes results
        return {
            "learners": self.learners,
            "subset_size": self.subset_size,
            "fit": vars(self.fit).copy(),
            "forest": vars(self.forest).copy(),
            "replications": self.replications,
            "split": self.split,
        }


@dataclass(frozen=True)
class RunContext:
    seed: int
    replication: int
    prefix: tuple[int, ...]
    settings: BenchSettings


@dataclass(frozen=True)
class Method:
    """A named procedure mapping (train, test features, context) to test predictions."""

    name: str
    run: Callable[[Dataset, np.ndarray, RunContext], np.ndarray]
    code: int = 0
    adaptive: bool = False
    forest: bool = False


def _single(train: Dataset, X_test: np.ndarray, ctx: RunContext) -> np.ndarray:
    fit = ctx.settings.fit
    if train.task is Task.REGRESSION:
        return predict_linear(fit_ols(train.features, train.target, fit), X_test)
    return predict_class(fit_logistic(train.features, train.target, fit), X_test)


def _rssl(scheme: Scheme):
    def run(train: Dataset, X_test: np.ndarray, ctx: RunContext) -> np.ndarray:
        s = ctx.settings
        cfg = ens.RsslConfig(s.learners, s.subset_size, scheme, train.task, s.fit, ctx.seed)
        model = ens.train_rssl(train, cfg, ctx.prefix, threads=s.threads)
        if train.task is Task.REGRESSION:
            return ens.predict_regression(model, X_test)
        return ens.predict_class(model, X_test)

    return run


def _forest(train: Dataset, X_test: np.ndarray, ctx: RunContext) -> np.ndarray:
    model = fit_forest(train, replace(ctx.settings.forest, seed=ctx.seed), ctx.prefix)
    return predict_forest(model, X_test)


def builtin(method_id: MethodId | str) -> Method:
    mid = MethodId(method_id)
    runs = {
        MethodId.SINGLE: _single,
        MethodId.UNIFORM: _rssl(Scheme.UNIFORM),
        MethodId.ADAPTIVE_CORR: _rssl(Scheme.CORRELATION),
        MethodId.ADAPTIVE_FSTAT: _rssl(Scheme.FSTAT),
        MethodId.FOREST: _forest,
    }
    return Method(mid.value, runs[mid], mid.code, mid.adaptive, mid is MethodId.FOREST)


def _as_method(m: Method | MethodId | str) -> Method:
    return m if isinstance(m, Method) else builtin(m)


@dataclass(frozen=True)
class MethodResult:
    name: str
    losses: tuple[float, ...]

    @property
    def mean(self) -> float:
        return math.fsum(self.losses) / len(self.losses)

    @property
    def std(self) -> float:
        """Sample standard deviation (divisor R - 1); 0 for a single replication."""
        r = len(self.losses)
        if r < 2:
            return 0.0
        m = self.mean
        return math.sqrt(math.fsum((x - m) ** 2 for x in self.losses) / (r - 1))


@dataclass
class BenchmarkReport:
    source: str
    task: Task
    results: list[MethodResult]
    metadata: dict = field(default_factory=dict)
    weights_used: dict[str, list[float]] = field(default_factory=dict)

    def result(self, name: str) -> MethodResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    @property
    def better_flag(self) -> bool | None:
        """True when every adaptive method beats the forest; None if either is absent."""
        rf = [r for r in self.results if r.name == MethodId.FOREST.value]
        adaptive = [r for r in self.results if r.name in (MethodId.ADAPTIVE_CORR.value, MethodId.ADAPTIVE_FSTAT.value)]
        if not rf or not adaptive:
            return None
        return all(a.mean < rf[0].mean for a in adaptive)

    def to_dict(self, invocation: dict | None = None, config: dict | None = None) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "invocation": invocation or {},
            "config": config if config is not None else self.metadata.get("settings", {}),
            "dataset_or_scenario": {"id": self.source, "task": self.task.value, **self.metadata.get("source", {})},
            "protocol": self.metadata.get("protocol", {}),
            "methods": [
                {"id": r.name, "mean": r.mean, "std": r.std, "losses": list(r.losses)} for r in self.results
            ],
            "better_flag": self.better_flag,
            "weights_used": self.weights_used,
        }


def avte(
    source: Dataset | ScenarioConfig,
    methods: Sequence[Method | MethodId | str],
    settings: BenchSettings = BenchSettings(),
    seed: int = 0,
) -> BenchmarkReport:
    """Average test error of each method over ``settings.replications`` replications.

    A fixed dataset is re-split (stratified for classification) in every
    replication; a scenario is regenerated from scratch.  Within a replication
    all methods see the same train/test data, and each method draws from its own
    streams ``(seed; r, method code, ...)`` so adding, removing or reordering
    methods leaves the others' losses unchanged.
    """
    R = settings.replications
    if R < 1:
        raise DataError("need at least one replication")
    methods = [_as_method(m) for m in methods]
    if not methods:
        raise DataError("no methods requested")
    names = [m.name for m in methods]
    if len(set(names)) != len(names):
        raise DataError(f"duplicate methods in {names}")
    task = source.task
    loss = task_loss(task)
    losses: dict[str, list[float]] = {m.name: [] for m in methods}
    weights_used: dict[str, list[float]] = {}

    if isinstance(source, ScenarioConfig):
        scenario = source.with_seed(seed)
        source_id = scenario.name
        source_meta = {"scenario": scenario.to_dict()}
        protocol = {"replications": R, "kind": "synthetic", "test_size": scenario.test_size}
    else:
        source_id = "dataset"
        source_meta = {"n": source.n, "p": source.p, "feature_names": list(source.feature_names)}
        protocol = {"replications": R, "kind": "resplit", "split": settings.split}

    for r in range(R):
        if isinstance(source, ScenarioConfig):
            train, test = generate(scenario, replication=r)
        else:
            s = split(source, settings.split, derive(seed, (r, Purpose.SPLIT)))
            train, test = source.rows(s.train_indices), source.rows(s.test_indices)
        if r == 0:
            for m in methods:
                if m.name in (MethodId.ADAPTIVE_CORR.value, MethodId.ADAPTIVE_FSTAT.value):
                    scheme = ADAPTIVE_SCHEME[MethodId(m.name)]
                    w = compute_weights(scheme, train.features, train.target, task is Task.CLASSIFICATION)
                    weights_used[scheme.value] = w.weights.tolist()
        for m in methods:
            ctx = RunContext(seed, r, (r, m.code), settings)
            pred = np.asarray(m.run(train, test.features, ctx))
            losses[m.name].append(loss(pred, test.target))

    return BenchmarkReport(
        source_id,
        task,
        [MethodResult(m.name, tuple(losses[m.name])) for m in methods],
        {"settings": settings.to_dict(), "source": source_meta, "protocol": {**protocol, "seed": seed}},
        weights_used,
    )


@dataclass
class RhoSweep:
    rhos: list[float]
    reports: list[BenchmarkReport]

    def rows(self) -> list[dict]:
        return [
            {"rho": rho, "method": res.name, "mean": res.mean, "std": res.std}
            for rho, rep in zip(self.rhos, self.reports)
            for res in rep.results
        ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, ["rho", "method", "mean", "std"], lineterminator="\n")
        w.writeheader()
        for row in self.rows():
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
        return buf.getvalue()


def rho_sweep(
    base: ScenarioConfig,
    rhos: Iterable[float],
    methods: Sequence[Method | MethodId | str],
    settings: BenchSettings = BenchSettings(),
    seed: int = 0,
) -> RhoSweep:
    rhos = [float(r) for r in rhos]
    return RhoSweep(rhos, [avte(replace(base, rho=rho), methods, settings, seed) for rho in rhos])


# ---------------------------------------------------------------------------
# tables


def _pm(res: MethodResult | None) -> str:
    if res is None:
        return "NA"
    return f"{_num(res.mean)}±{_num(res.std)}"


def _num(x: float) -> str:
    if not math.isfinite(x):
        return str(x)
    if x != 0 and (abs(x) >= 1e4 or abs(x) < 1e-3):
        return f"{x:.1e}"
    return f"{x:.3f}" if abs(x) < 1 else f"{x:.2f}"


def comparison_rows(reports: Sequence[BenchmarkReport], schemes: Sequence[Scheme]) -> list[dict]:
    """One row per (scheme, scenario) in the WEIGHTING/N/P/rho/... layout."""
    rows = []
    for scheme in schemes:
        adaptive = {Scheme.CORRELATION: MethodId.ADAPTIVE_CORR, Scheme.FSTAT: MethodId.ADAPTIVE_FSTAT}[scheme]
        for rep in reports:
            scen = rep.metadata["source"]["scenario"]
            got = {r.name: r for r in rep.results}
            a, rf = got.get(adaptive.value), got.get(MethodId.FOREST.value)
            rows.append(
                {
                    "weighting": scheme.value,
                    "n": scen["n"],
                    "p": scen["p"],
                    "rho": scen["rho"],
                    "single": got.get(MethodId.SINGLE.value),
                    "uniform": got.get(MethodId.UNIFORM.value),
                    "adaptive": a,
                    "rf": rf,
                    "better": None if a is None or rf is None else a.mean < rf.mean,
                }
            )
    return rows


_SCHEME_TITLE = {Scheme.CORRELATION.value: "CORRELATION", Scheme.FSTAT.value: "F-STATISTICS"}


def format_comparison(rows: list[dict], task: Task) -> str:
    base = "MLR" if task is Task.REGRESSION else "GLM"
    header = ["WEIGHTING", "N", "P", "ρ", base, f"UNIFORM {base}", f"ADAPTIVE {base}", "RF", "BETTER?"]
    body = []
    last = None
    for row in rows:
        title = _SCHEME_TITLE[row["weighting"]] if row["weighting"] != last else ""
        last = row["weighting"]
        flag = {True: "✓", False: "×", None: "NA"}[row["better"]]
        body.append(
            [title, str(row["n"]), str(row["p"]), f"{row['rho']:g}"]
            + [_pm(row[k]) for k in ("single", "uniform", "adaptive", "rf")]
            + [flag]
        )
    return _align([header, *body])


def _align(table: list[list[str]]) -> str:
    widths = [max(len(r[i]) for r in table) for i in range(len(table[0]))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in table) + "\n"


def comparison_csv(rows: list[dict]) -> str:
    """Long format: one line per (weighting, scenario, method)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["weighting", "n", "p", "rho", "method", "mean", "std", "better"])
    for row in rows:
        for key in ("single", "uniform", "adaptive", "rf"):
            res = row[key]
            if res is None:
                continue
            w.writerow(
                [row["weighting"], row["n"], row["p"], row["rho"], res.name, repr(res.mean), repr(res.std), row["better"]]
            )
    return buf.getvalue()


def format_report(report: BenchmarkReport) -> str:
    table = [["METHOD", "MEAN", "STD", "R"]]
    for r in report.results:
        table.append([r.name, _num(r.mean), _num(r.std), str(len(r.losses))])
    flag = {True: "✓", False: "×", None: "NA"}[report.better_flag]
    return f"{report.source} ({report.task.value})\n" + _align(table) + f"BETTER? {flag}\n"
