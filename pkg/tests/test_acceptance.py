"""Acceptance criteria, one test each.

Every test prints a single ``[ACCEPT] <id> PASS|FAIL ...`` line before asserting, so
``pytest -v -s tests/test_acceptance.py`` (or the captured log) gives a one-line verdict
per criterion. The long-running ones carry the ``slow`` marker.
"""

import json
import math
import time

import numpy as np
import pytest

from rssl import ensemble as ens
from rssl.cli import main as cli_main
from rssl.data import Dataset, Task
from rssl.evaluation import BenchSettings, Method, avte
from rssl.forest import CompiledTree, ForestConfig, fit_tree
from rssl.learners import FitConfig, fit_logistic, fit_ols, penalized_gradient, penalized_loglik
from rssl.learners import predict_class, predict_linear, predict_proba
from rssl.rngcore import derive
from rssl.sampling import draw_subset
from rssl.synthetic import ScenarioConfig, generate
from rssl.weighting import Scheme

# acceptance tolerances
OLS_TOL = 1e-8
GRAD_NORM_TOL = 1e-6
FD_REL_TOL = 1e-5
SEPARATION_SE = 3.0
CORR_TOL_RHO = 0.02
CORR_TOL_ZERO = 0.03


def verdict(cid: str, ok: bool, detail: str, capsys) -> None:
    with capsys.disabled():
        print(f"\n[ACCEPT] {cid} {'PASS' if ok else 'FAIL'} {detail}")


def test_c01_ols_oracle(capsys):
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        X = rng.normal(size=(50, 5))
        y = X @ rng.normal(size=5) + rng.normal(size=50)
        A = np.column_stack([np.ones(50), X])
        oracle = np.linalg.solve(A.T @ A, A.T @ y)
        m = fit_ols(X, y)
        got = np.concatenate([[m.intercept], m.coefficients])
        worst = max(worst, float(np.max(np.abs(got - oracle))))
    elapsed = time.perf_counter() - t0
    ok = worst <= OLS_TOL and elapsed < 5
    verdict("C1-ols-oracle", ok, f"max_abs={worst:.2e} time={elapsed:.2f}s", capsys)
    assert ok


def test_c02_logistic_stationarity(capsys):
    rng = np.random.default_rng(202)
    cfg = FitConfig()
    t0 = time.perf_counter()
    worst_grad, worst_fd = 0.0, 0.0
    for _ in range(100):
        X = rng.normal(size=(80, 4))
        y = (rng.random(80) < 1 / (1 + np.exp(-(X @ rng.normal(size=4))))).astype(float)
        m = fit_logistic(X, y, cfg)
        assert m.converged
        A = np.column_stack([np.ones(80), X])
        theta = np.concatenate([[m.intercept], m.coefficients])
        worst_grad = max(worst_grad, float(np.linalg.norm(penalized_gradient(theta, A, y, cfg.ridge_jitter))))
        # finite differences at a generic point, away from the optimum
        probe = theta + rng.normal(scale=0.3, size=theta.shape)
        g = penalized_gradient(probe, A, y, cfg.ridge_jitter)
        h = 1e-5
        fd = np.array(
            [
                (penalized_loglik(probe + h * e, A, y, cfg.ridge_jitter) - penalized_loglik(probe - h * e, A, y, cfg.ridge_jitter)) / (2 * h)
                for e in np.eye(theta.size)
            ]
        )
        worst_fd = max(worst_fd, float(np.max(np.abs(fd - g)) / max(1.0, float(np.max(np.abs(g))))))
    elapsed = time.perf_counter() - t0
    ok = worst_grad <= GRAD_NORM_TOL and worst_fd <= FD_REL_TOL and elapsed < 30
    verdict("C2-logistic-stationarity", ok, f"grad_norm={worst_grad:.2e} fd_rel={worst_fd:.2e} time={elapsed:.2f}s", capsys)
    assert ok


def test_c03_weighted_subsampling(capsys):
    w = np.array([0.5, 0.3, 0.2] + [0.0] * 7)
    draws = 100_000
    rng = derive(303, (1,))
    t0 = time.perf_counter()
    counts = np.zeros(10)
    for _ in range(draws):
        counts[draw_subset(w, 2, rng)] += 1
    elapsed = time.perf_counter() - t0
    f = counts / draws
    se = lambda a, b: math.sqrt((f[a] * (1 - f[a]) + f[b] * (1 - f[b])) / draws)
    sep01 = (f[0] - f[1]) / se(0, 1)
    sep12 = (f[1] - f[2]) / se(1, 2)
    ok = sep01 >= SEPARATION_SE and sep12 >= SEPARATION_SE and counts[3:].sum() == 0 and elapsed < 10
    verdict(
        "C3-weighted-subsampling",
        ok,
        f"freq={np.round(f[:3], 4).tolist()} sep={sep01:.1f},{sep12:.1f}SE zero_drawn={int(counts[3:].sum())} time={elapsed:.2f}s",
        capsys,
    )
    assert ok


@pytest.mark.parametrize("task", [Task.REGRESSION, Task.CLASSIFICATION])
def test_c04_reduction_identity(task, capsys):
    rng = np.random.default_rng(404)
    X = rng.normal(size=(60, 4))
    eta = X @ np.array([1.0, -1.0, 0.5, 0.0])
    y = eta + rng.normal(size=60) if task is Task.REGRESSION else (rng.random(60) < 1 / (1 + np.exp(-eta))).astype(float)
    data = Dataset(X, y, task)
    model = ens.train_rssl(data, ens.RsslConfig(1, data.p, Scheme.UNIFORM, task, no_resample=True))
    X_new = rng.normal(size=(200, 4))
    if task is Task.REGRESSION:
        ok = np.array_equal(ens.predict_regression(model, X_new), predict_linear(fit_ols(X, y), X_new))
    else:
        plain = fit_logistic(X, y)
        ok = np.array_equal(ens.predict_class(model, X_new), predict_class(plain, X_new)) and np.array_equal(
            ens.predict_proba_ensemble(model, X_new), predict_proba(plain, X_new)
        )
    verdict(f"C4-reduction-identity[{task.value}]", ok, "exact equality" if ok else "predictions differ", capsys)
    assert ok


@pytest.mark.slow
@pytest.mark.parametrize("rho", [0.05, 0.5])
def test_c05_hdlss_regression_ordering(rho, capsys):
    t0 = time.perf_counter()
    rep = avte(
        ScenarioConfig(25, 200, rho, Task.REGRESSION),
        ["single", "uniform", "adaptive-corr"],
        BenchSettings(learners=450, replications=30),
        seed=0,
    )
    elapsed = time.perf_counter() - t0
    mlr, uni, ada = (rep.result(k).mean for k in ("single", "uniform", "adaptive-corr"))
    ok = ada < uni and mlr > 10 * ada and elapsed < 600
    verdict(
        f"C5-hdlss-regression[rho={rho}]",
        ok,
        f"mlr={mlr:.3f} uniform={uni:.3f} adaptive={ada:.3f} mlr/adaptive={mlr / ada:.2f} time={elapsed:.0f}s",
        capsys,
    )
    assert ok


@pytest.mark.slow
def test_c06_hdlss_classification(capsys):
    t0 = time.perf_counter()
    rep = avte(
        ScenarioConfig(50, 1000, 0.05, Task.CLASSIFICATION),
        ["uniform", "adaptive-fstat"],
        BenchSettings(learners=450, replications=20),
        seed=0,
    )
    elapsed = time.perf_counter() - t0
    uni, ada = rep.result("uniform").mean, rep.result("adaptive-fstat").mean
    ok = ada <= 0.5 * uni and elapsed < 900
    verdict("C6-hdlss-classification", ok, f"uniform={uni:.4f} adaptive={ada:.4f} ratio={ada / uni:.3f} time={elapsed:.0f}s", capsys)
    assert ok


@pytest.fixture(scope="module")
def low_dim_report():
    return avte(
        ScenarioConfig(200, 25, 0.05, Task.REGRESSION),
        ["single", "uniform", "adaptive-corr", "rf"],
        BenchSettings(learners=450, replications=30),
        seed=0,
    )


@pytest.mark.slow
def test_c07_low_dim_sanity(low_dim_report, capsys):
    mlr, uni, ada = (low_dim_report.result(k).mean for k in ("single", "uniform", "adaptive-corr"))
    ok = ada <= 1.3 * mlr and uni >= ada
    verdict("C7-low-dim-sanity", ok, f"mlr={mlr:.3f} uniform={uni:.3f} adaptive={ada:.3f} adaptive/mlr={ada / mlr:.2f}", capsys)
    assert ok


def test_c08_avte_hand_check(capsys):
    # squared errors 0,4,0,4,... in replication 0 and 4,4,... in replication 1
    def stub_run(train, X, ctx):
        if ctx.replication == 0:
            return np.where(np.arange(X.shape[0]) % 2 == 0, 0.0, 2.0)
        return np.full(X.shape[0], 2.0)

    stub = Method("stub", stub_run)
    data = Dataset(np.arange(20, dtype=float)[:, None], np.zeros(20), Task.REGRESSION)
    res = avte(data, [stub], BenchSettings(replications=2)).result("stub")
    ok = (
        res.losses == (2.0, 4.0) and res.mean == 3.0 and res.std == math.sqrt(2.0)
    )
    verdict("C8-avte-hand-check", ok, f"losses={res.losses} mean={res.mean!r} std={res.std!r}", capsys)
    assert ok


@pytest.mark.parametrize(
    "scenario",
    [("regression", 30, 8, 0.05), ("regression", 25, 60, 0.5), ("classification", 40, 10, 0.05)],
)
def test_c09_determinism(scenario, tmp_path, capsys):
    task, n, p, rho = scenario
    base = ["bench", "--task", task, "--n", n, "--p", p, "--rho", rho, "--seed", 11]
    base += ["--learners", 30, "--trees", 10, "--replications", 2, "--test-size", 100]
    outs = []
    for tag, threads in (("a", 1), ("b", 1), ("c", 8)):
        assert cli_main([str(a) for a in base + ["--threads", threads, "--out", tmp_path / tag]]) == 0
        outs.append((tmp_path / tag / "results.json").read_bytes())
    ok = outs[0] == outs[1] == outs[2]
    json.loads(outs[0])
    verdict(f"C9-determinism[{task}-n{n}-p{p}-rho{rho}]", ok, "byte-identical" if ok else "bytes differ", capsys)
    assert ok


def test_c10_generator_moments(capsys):
    t0 = time.perf_counter()
    devs = {}
    for rho, tol in ((0.5, CORR_TOL_RHO), (0.0, CORR_TOL_ZERO)):
        cfg = ScenarioConfig(100_000, 3, rho, Task.REGRESSION, seed=1010, test_size=10)
        train, _ = generate(cfg)
        c = np.corrcoef(train.features, rowvar=False)
        off = c[~np.eye(3, dtype=bool)]
        devs[rho] = (float(np.max(np.abs(off - rho))), tol)
    elapsed = time.perf_counter() - t0
    ok = all(d <= tol for d, tol in devs.values()) and elapsed < 20
    verdict("C10-generator-moments", ok, f"max_dev(rho=.5)={devs[0.5][0]:.4f} max_dev(rho=0)={devs[0.0][0]:.4f} time={elapsed:.2f}s", capsys)
    assert ok


@pytest.mark.slow
def test_c11_forest_sanity(low_dim_report, capsys):
    rf, mlr = low_dim_report.result("rf").mean, low_dim_report.result("single").mean
    X = np.array([[1.0], [2.0], [3.0], [4.0]])
    y = np.array([0.0, 0.0, 1.0, 1.0])
    tree = fit_tree(X, y, ForestConfig(trees=1, mtry=1, min_leaf=1).resolved(Task.CLASSIFICATION, 1), derive(0, (1,)), True)
    train_err = float(np.mean(CompiledTree(tree).predict(X) != y))
    ok = math.isfinite(rf) and rf > mlr and train_err == 0.0 and tree.threshold == 2.5
    verdict("C11-forest-sanity", ok, f"rf={rf:.3f} mlr={mlr:.3f} tree_train_error={train_err} root_threshold={tree.threshold}", capsys)
    assert ok
