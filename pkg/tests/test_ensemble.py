import itertools
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import rssl.ensemble as ens
from rssl.data import Dataset, Task
from rssl.errors import DataError, NumericalError
from rssl.learners import LinearModel, LogisticModel, fit_logistic, fit_ols, predict_class, predict_linear, predict_proba
from rssl.weighting import FeatureWeights, Scheme, uniform_weights

CHI2_9_999 = 27.877


def regression_data(rng, n=40, p=6):
    X = rng.normal(size=(n, p))
    return Dataset(X, X[:, 0] - X[:, 1] + rng.normal(size=n), Task.REGRESSION)


def classification_data(rng, n=60, p=5):
    X = rng.normal(size=(n, p))
    y = (rng.random(n) < 1 / (1 + np.exp(-2 * X[:, 0]))).astype(float)
    y[:2] = [0, 1]
    return Dataset(X, y, Task.CLASSIFICATION)


def hand_model(task, intercepts, coefs, subsets, p):
    cls = LogisticModel if task is Task.CLASSIFICATION else LinearModel
    members = tuple(
        ens.Member(np.array(s), cls(b, np.array(c, dtype=float), np.array(s)))
        for b, c, s in zip(intercepts, coefs, subsets)
    )
    return ens.EnsembleModel(members, task, uniform_weights(p), len(subsets[0]))


def test_auto_subset_size():
    assert ens.resolve_subset_size("auto", 200, 25) == 5
    assert ens.resolve_subset_size("auto", 25, 200) == 15
    assert ens.resolve_subset_size("auto", 50, 1000) == 32
    assert ens.resolve_subset_size("auto", 2, 10) == 1
    assert ens.resolve_subset_size("auto", 5, 100) == 3
    assert ens.resolve_subset_size(3, 10, 4) == 3
    with pytest.raises(DataError):
        ens.resolve_subset_size(5, 10, 4)


@pytest.mark.parametrize("task", [Task.REGRESSION, Task.CLASSIFICATION])
def test_reduction_to_single_learner(np_rng, task):
    data = regression_data(np_rng) if task is Task.REGRESSION else classification_data(np_rng)
    cfg = ens.RsslConfig(1, data.p, Scheme.UNIFORM, task, no_resample=True)
    model = ens.train_rssl(data, cfg)
    X_new = np_rng.normal(size=(25, data.p))
    if task is Task.REGRESSION:
        plain = fit_ols(data.features, data.target)
        assert np.array_equal(ens.predict_regression(model, X_new), predict_linear(plain, X_new))
    else:
        plain = fit_logistic(data.features, data.target)
        assert np.array_equal(ens.predict_class(model, X_new), predict_class(plain, X_new))
        assert np.array_equal(ens.predict_proba_ensemble(model, X_new), predict_proba(plain, X_new))


def test_structure(np_rng):
    data = regression_data(np_rng)
    model = ens.train_rssl(data, ens.RsslConfig(5, 3, Scheme.CORRELATION))
    assert model.n_members == 5
    for m in model.members:
        assert m.subset.shape == (3,) and np.all(np.diff(m.subset) > 0)
        assert np.array_equal(m.model.feature_indices, m.subset)


def test_concentrated_weights_select_feature_zero_most(np_rng):
    n = 1000
    X = np_rng.normal(size=(n, 5))
    data = Dataset(X, X[:, 0] + 0.01 * np_rng.normal(size=n), Task.REGRESSION)
    model = ens.train_rssl(data, ens.RsslConfig(450, 2, Scheme.CORRELATION))
    assert model.weights_used.weights[0] >= 0.99
    counts = np.zeros(5)
    for m in model.members:
        counts[m.subset] += 1
    assert counts[0] > counts[1:].max()


def test_regression_mean_examples():
    X = np.array([[1.0, 2.0]])
    assert ens.predict_regression(hand_model(Task.REGRESSION, [3.0, 3.0], [[0.0], [0.0]], [[0], [1]], 2), X[0]) == 3.0
    assert ens.predict_regression(hand_model(Task.REGRESSION, [1.0, 3.0], [[0.0], [0.0]], [[0], [1]], 2), X[0]) == 2.0


def test_regression_mean_matches_direct_summation(np_rng):
    p = 6
    subsets = [sorted(np_rng.choice(p, 3, replace=False).tolist()) for _ in range(7)]
    model = hand_model(Task.REGRESSION, np_rng.normal(size=7), np_rng.normal(size=(7, 3)), subsets, p)
    for x in np_rng.normal(size=(20, p)):
        total = 0.0
        for m in model.members:
            total += m.model.intercept + sum(c * x[j] for c, j in zip(m.model.coefficients, m.subset))
        assert ens.predict_regression(model, x) == pytest.approx(total / 7, abs=1e-12)


def test_vote_examples():
    x = np.array([0.0])
    logit = lambda q: np.log(q / (1 - q))  # noqa: E731
    three = hand_model(Task.CLASSIFICATION, [logit(0.8), logit(0.7), logit(0.1)], [[0.0]] * 3, [[0]] * 3, 1)
    assert ens.predict_class(three, x) == 1
    tie = hand_model(Task.CLASSIFICATION, [logit(0.3), logit(0.9)], [[0.0]] * 2, [[0]] * 2, 1)
    assert ens.predict_proba_ensemble(tie, x) == pytest.approx(0.6)
    assert ens.predict_class(tie, x) == 1
    low_tie = hand_model(Task.CLASSIFICATION, [logit(0.1), logit(0.6)], [[0.0]] * 2, [[0]] * 2, 1)
    assert ens.predict_class(low_tie, x) == 0
    one = hand_model(Task.CLASSIFICATION, [logit(0.2)], [[0.0]], [[0]], 1)
    assert ens.predict_class(one, x) == 0


def test_exact_half_tie_goes_to_class_zero():
    assert ens.vote(np.array([0, 1]), 0.5) == 0
    assert ens.vote(np.array([0, 1]), 0.5000001) == 1


def test_proba_examples():
    x = np.array([0.0])
    half = hand_model(Task.CLASSIFICATION, [0.0, 0.0], [[0.0]] * 2, [[0]] * 2, 1)
    assert ens.predict_proba_ensemble(half, x) == 0.5
    qs = [0.2, 0.5, 0.95]
    three = hand_model(Task.CLASSIFICATION, [np.log(q / (1 - q)) for q in qs], [[0.0]] * 3, [[0]] * 3, 1)
    assert ens.predict_proba_ensemble(three, x) == pytest.approx(sum(qs) / 3, abs=1e-15)


def test_task_mismatch(np_rng):
    model = ens.train_rssl(regression_data(np_rng), ens.RsslConfig(2, 2))
    with pytest.raises(DataError):
        ens.predict_class(model, np.zeros(6))
    with pytest.raises(DataError):
        ens.train_rssl(classification_data(np_rng), ens.RsslConfig(2, 2))


@settings(max_examples=15)
@given(seed=st.integers(0, 10**6), task=st.sampled_from(list(Task)))
def test_aggregation_invariants(seed, task):
    rng = np.random.default_rng(seed)
    data = regression_data(rng, 30, 5) if task is Task.REGRESSION else classification_data(rng, 30, 5)
    model = ens.train_rssl(data, ens.RsslConfig(9, 2, Scheme.CORRELATION, task, seed=seed))
    X = rng.normal(size=(15, 5))
    shuffled = model.permuted(rng.permutation(9))
    if task is Task.REGRESSION:
        pred = ens.predict_regression(model, X)
        np.testing.assert_allclose(ens.predict_regression(shuffled, X), pred, rtol=1e-13, atol=1e-13)
        members = model.member_decisions(X)
        assert np.all(pred >= members.min(axis=1) - 1e-12) and np.all(pred <= members.max(axis=1) + 1e-12)
    else:
        pred = ens.predict_class(model, X)
        assert np.array_equal(ens.predict_class(shuffled, X), pred)
        votes = (model.member_decisions(X) >= 0).sum(axis=1)
        won = np.where(pred == 1, votes, 9 - votes)
        assert np.all(won >= 5)


def test_deterministic_across_threads(np_rng):
    data = classification_data(np_rng)
    cfg = ens.RsslConfig(40, 3, Scheme.FSTAT, Task.CLASSIFICATION, seed=11)
    a = ens.train_rssl(data, cfg, (2, 3), threads=1).to_json()
    b = ens.train_rssl(data, cfg, (2, 3), threads=4).to_json()
    c = ens.train_rssl(data, cfg, (2, 3), threads=1).to_json()
    assert a == b == c
    assert ens.train_rssl(data, replace(cfg, seed=12), (2, 3)).to_json() != a


@pytest.mark.parametrize("task", [Task.REGRESSION, Task.CLASSIFICATION])
def test_json_round_trip(np_rng, task):
    data = regression_data(np_rng) if task is Task.REGRESSION else classification_data(np_rng)
    model = ens.train_rssl(data, ens.RsslConfig(6, 3, Scheme.CORRELATION, task, seed=4))
    text = model.to_json()
    back = ens.EnsembleModel.from_json(text)
    assert back.to_json() == text
    X = np_rng.normal(size=(10, data.p))
    assert np.array_equal(back.member_decisions(X), model.member_decisions(X))


def test_uniform_scheme_subsets_are_uniform(np_rng):
    data = regression_data(np_rng, 30, 5)
    model = ens.train_rssl(data, ens.RsslConfig(3000, 2, Scheme.UNIFORM, seed=8))
    counts = dict.fromkeys(itertools.combinations(range(5), 2), 0)
    for m in model.members:
        counts[tuple(m.subset.tolist())] += 1
    expected = 3000 / 10
    chi2 = sum((c - expected) ** 2 / expected for c in counts.values())
    assert chi2 < CHI2_9_999


def test_degenerate_bootstraps_exhaust_retries(np_rng, monkeypatch):
    data = classification_data(np_rng)
    monkeypatch.setattr(ens, "bootstrap", lambda n, rng: np.zeros(n, dtype=np.int64))
    with pytest.raises(NumericalError):
        ens.train_rssl(data, ens.RsslConfig(2, 2, Scheme.UNIFORM, Task.CLASSIFICATION))


def test_rare_class_is_handled_by_retries(np_rng):
    X = np_rng.normal(size=(12, 3))
    y = np.zeros(12)
    y[0] = 1.0
    model = ens.train_rssl(Dataset(X, y, "classification"), ens.RsslConfig(30, 2, Scheme.UNIFORM, "classification"))
    assert model.n_members == 30
