import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from buycascade.errors import ArityMismatch, EmptyDataset, MissingClass, ModelFormatError
from buycascade.learn import (
    BoostedEnsemble,
    BoostParams,
    Forest,
    ForestParams,
    LabeledDataset,
    NaiveBayes,
    TreeParams,
    adaboost_scores,
    apply_tree,
    forest_scores,
    heuristic_from_ratios,
    load_model,
    naive_bayes_scores,
    predict_adaboost,
    predict_forest,
    predict_tree,
    predict_tree_labels,
    resample,
    resample_indices,
    save_model,
    train_adaboost_m1,
    train_forest,
    train_naive_bayes,
    train_tree,
    training_error_bound,
)
from buycascade.model import Label


def gini_split(x, y, w, thr):
    """Weighted Gini sum of the two children, computed directly."""
    total = 0.0
    for side in (x <= thr, x > thr):
        W = w[side].sum()
        if W > 0:
            p = w[side & (y == 1)].sum() / W
            total += W * 2 * p * (1 - p)
    return total


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 6), st.integers(0, 1), st.integers(1, 4)), min_size=2, max_size=25))
def test_stump_is_gini_optimal(rows):
    x = np.array([r[0] for r in rows], float)
    y = np.array([r[1] for r in rows])
    w = np.array([r[2] for r in rows], float)
    if len(set(y)) < 2 or len(set(x)) < 2:
        return
    t = train_tree(LabeledDataset(x, y, w), TreeParams(max_depth=1))
    vals = np.unique(x)
    best = min(gini_split(x, y, w, (a + b) / 2) for a, b in zip(vals, vals[1:]))
    assert t.feature[0] == 0
    assert math.isclose(gini_split(x, y, w, t.threshold[0]), best, rel_tol=1e-9, abs_tol=1e-12)


def test_stump_threshold_midpoint():
    t = train_tree(LabeledDataset([1.0, 2.0, 3.0, 4.0], [0, 0, 1, 1]), TreeParams(max_depth=1))
    assert t.threshold[0] == 2.5
    assert predict_tree_labels(t, np.array([[2.5], [2.6]])).tolist() == [0, 1]


XOR_X = np.array([[0, 0], [0, 1], [1, 0], [1, 1]], float)
XOR_Y = np.array([0, 1, 1, 0])


def depth2_xor_solvable():
    """Brute force over axis-aligned depth-2 trees with midpoint thresholds."""
    for f0, f1, f2 in itertools.product(range(2), repeat=3):
        for labels in itertools.product((0, 1), repeat=4):
            pred = []
            for x in XOR_X:
                if x[f0] <= 0.5:
                    pred.append(labels[0] if x[f1] <= 0.5 else labels[1])
                else:
                    pred.append(labels[2] if x[f2] <= 0.5 else labels[3])
            if (np.array(pred) == XOR_Y).all():
                return True
    return False


@pytest.mark.parametrize("seed", range(5))
def test_xor_depth2(seed):
    assert depth2_xor_solvable()
    t = train_tree(LabeledDataset(XOR_X, XOR_Y), TreeParams(max_depth=2, seed=seed))
    assert (predict_tree_labels(t, XOR_X) == XOR_Y).all()
    assert t.depth == 2


def test_pure_node_is_leaf():
    t = train_tree(LabeledDataset([[1.0], [2.0]], [1, 1]))
    assert t.node_count == 1 and predict_tree(t, np.array([[0.0]])).tolist() == [[0.0, 1.0]]


def test_min_leaf_respected():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(200, 3))
    y = (rng.random(200) < 0.5).astype(int)
    t = train_tree(LabeledDataset(X, y), TreeParams(min_leaf=7))
    _, counts = np.unique(apply_tree(t, X), return_counts=True)
    assert counts.min() >= 7


def test_empty_dataset():
    with pytest.raises(EmptyDataset):
        train_tree(LabeledDataset(np.empty((0, 2)), []))


def separable(n=500, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 5))
    y = (X[:, 0] + X[:, 2] > 0).astype(int)
    return X, y


def test_forest_separable():
    X, y = separable()
    f = train_forest(LabeledDataset(X, y), ForestParams(n_trees=50, seed=3))
    labels, _ = predict_forest(f, X)
    assert (labels == y).mean() >= 0.99
    assert f.feature_subset_size == 2


def test_forest_deterministic_across_threads():
    X, y = separable(200)
    a = train_forest(LabeledDataset(X, y), ForestParams(n_trees=8, seed=5))
    b = train_forest(LabeledDataset(X, y), ForestParams(n_trees=8, seed=5, threads=3))
    c = train_forest(LabeledDataset(X, y), ForestParams(n_trees=8, seed=6))
    assert a.trees == b.trees
    assert a.trees != c.trees


def test_forest_scores_are_probabilities():
    X, y = separable(100)
    s = forest_scores(train_forest(LabeledDataset(X, y), ForestParams(n_trees=5)), X)
    assert ((0 <= s) & (s <= 1)).all()


def test_arity_mismatch():
    X, y = separable(50)
    f = train_forest(LabeledDataset(X, y), ForestParams(n_trees=2))
    with pytest.raises(ArityMismatch):
        forest_scores(f, X[:, :4])


@given(st.integers(1, 300), st.integers(0, 1000), st.integers(1, 400), st.floats(0, 1))
def test_resample_counts(n_pos, n_neg, size, p):
    y = np.array([1] * n_pos + [0] * n_neg)
    if n_neg == 0 and size - math.floor(size * p) > 0:
        with pytest.raises(MissingClass):
            resample_indices(y, p, size)
        return
    idx = resample_indices(y, p, size, seed=1)
    assert len(idx) == size
    assert int(y[idx].sum()) == math.floor(size * p)


def test_resample_default_size_and_missing_class():
    d = LabeledDataset(np.arange(10.0), [1, 0, 0, 0, 0, 0, 0, 0, 0, 0])
    r = resample(d, 0.5)
    assert len(r) == 10 and r.y.sum() == 5 and set(r.X[r.y == 1, 0]) == {0.0}
    with pytest.raises(MissingClass):
        resample(LabeledDataset([1.0, 2.0], [0, 0]))


def noisy(n=400, seed=1):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 4))
    y = (X[:, 0] + 0.5 * X[:, 1] + 0.8 * rng.normal(size=n) > 0.3).astype(int)
    return X, y


def test_adaboost_weights_normalized():
    X, y = noisy()
    e = train_adaboost_m1(LabeledDataset(X, y), BoostParams(rounds=10))
    assert len(e.learners) >= 2
    assert all(abs(s - 1.0) <= 1e-12 for s in e.weight_sums)
    assert all(0 < eps < 0.5 for eps in e.errors[: len(e.alphas)])
    assert all(math.isclose(a, math.log((1 - eps) / eps)) for a, eps in zip(e.alphas, e.errors))


@pytest.mark.parametrize("seed", range(4))
def test_adaboost_error_bound(seed):
    X, y = noisy(300, seed)
    e = train_adaboost_m1(LabeledDataset(X, y), BoostParams(rounds=15))
    for T in range(1, len(e.learners) + 1):
        votes = sum(a * (2 * predict_tree_labels(t, X) - 1) for t, a in zip(e.learners[:T], e.alphas[:T]))
        err = np.mean((votes >= 0).astype(int) != y)
        assert err <= training_error_bound(e.errors[:T]) + 1e-12


def test_adaboost_stops_at_chance():
    X = np.ones((6, 2))
    y = np.array([0, 1, 0, 1, 0, 1])
    e = train_adaboost_m1(LabeledDataset(X, y), BoostParams(rounds=10))
    assert len(e.learners) == 1 and e.stop_reason == "error>=0.5" and e.errors == [0.5]


def test_adaboost_perfect_round_stops():
    e = train_adaboost_m1(LabeledDataset([1.0, 2.0, 3.0, 4.0], [0, 0, 1, 1]))
    assert len(e.learners) == 1 and e.stop_reason == "error==0"
    assert predict_adaboost(e, np.array([[1.0], [4.0]]))[0].tolist() == [0, 1]


def test_adaboost_missing_class():
    with pytest.raises(MissingClass):
        train_adaboost_m1(LabeledDataset([1.0, 2.0], [1, 1]))


def test_adaboost_scores_range():
    X, y = noisy()
    s = adaboost_scores(train_adaboost_m1(LabeledDataset(X, y)), X)
    assert ((0 <= s) & (s <= 1)).all()


def normal_pdf(x, mu, var):
    return math.exp(-((x - mu) ** 2) / (2 * var)) / math.sqrt(2 * math.pi * var)


def test_naive_bayes_hand_computed():
    # class 0: {0, 2} -> mean 1, var 1; class 1: {4, 6} -> mean 5, var 1
    m = train_naive_bayes(LabeledDataset([0.0, 2.0, 4.0, 6.0], [0, 0, 1, 1]))
    assert m.mean[:, 0].tolist() == [1.0, 5.0] and m.var[:, 0].tolist() == [1.0, 1.0]
    for x in (3.0, 4.0, 0.5):
        p0, p1 = normal_pdf(x, 1, 1), normal_pdf(x, 5, 1)
        assert math.isclose(naive_bayes_scores(m, np.array([[x]]))[0], p1 / (p0 + p1), rel_tol=1e-12)


def test_naive_bayes_extreme_no_nan():
    m = train_naive_bayes(LabeledDataset([0.0, 2.0, 4.0, 6.0], [0, 0, 1, 1]))
    s = naive_bayes_scores(m, np.array([[1e6], [-1e6]]))
    assert np.isfinite(s).all() and s.tolist() == [1.0, 0.0]


def test_heuristic_examples():
    assert heuristic_from_ratios({1: 10.0, 2: 6.0, 3: 1.0}) == (Label.BUY, [1, 2])
    assert heuristic_from_ratios({1: 5.5, 2: 5.5}) == (Label.NON_BUY, [])
    assert heuristic_from_ratios({4: 2.0, 5: 20.0}) == (Label.BUY, [5])
    assert heuristic_from_ratios({}) == (Label.NON_BUY, [])


@given(st.dictionaries(st.integers(0, 50), st.floats(0, 100), min_size=1, max_size=10))
def test_heuristic_properties(ratios):
    label, items = heuristic_from_ratios(ratios)
    if label is Label.BUY:
        assert len(items) == math.ceil(len(ratios) / 2)
        assert [ratios[i] for i in items] == sorted((ratios[i] for i in items), reverse=True)
        assert min(ratios[i] for i in items) >= max((ratios[i] for i in ratios if i not in items), default=-1)
    else:
        assert items == []


def trained_models():
    X, y = noisy(200)
    d = LabeledDataset(X, y)
    return X, [
        train_tree(d, TreeParams(max_depth=4)),
        train_forest(d, ForestParams(n_trees=5)),
        train_adaboost_m1(d),
        train_naive_bayes(d),
    ]


def score_any(model, X):
    if isinstance(model, Forest):
        return forest_scores(model, X)
    if isinstance(model, BoostedEnsemble):
        return adaboost_scores(model, X)
    if isinstance(model, NaiveBayes):
        return naive_bayes_scores(model, X)
    return predict_tree(model, X)[:, 1]


def test_serialization_bit_exact(tmp_path):
    X, models = trained_models()
    for k, m in enumerate(models):
        path = tmp_path / f"m{k}.json"
        save_model(m, path)
        again = load_model(path)
        assert np.array_equal(score_any(m, X), score_any(again, X))


def test_serialization_bad_header(tmp_path):
    p = tmp_path / "x.json"
    p.write_text(json.dumps({"format": "other", "version": 1}))
    with pytest.raises(ModelFormatError):
        load_model(p)
    p.write_text("{not json")
    with pytest.raises(ModelFormatError):
        load_model(p)
    p.write_text(json.dumps({"format": "buycascade-model", "version": 99}))
    with pytest.raises(ModelFormatError):
        load_model(p)


def test_stump_pair():
    t = train_tree(LabeledDataset([0.0, 1.0], [0, 1]), TreeParams(max_depth=1))
    assert t.threshold[0] == 0.5
    assert predict_tree(t, np.array([[0.0], [1.0], [0.5]])).tolist() == [[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]]


def test_single_tree_forest_fits_consistent_data():
    X, y = noisy(300)
    f = train_forest(LabeledDataset(X, y), ForestParams(n_trees=1, feature_subset_size=4, seed=2))
    # the lone tree still sees a bootstrap sample; it must be exact on those rows
    boot_seed, _ = np.random.SeedSequence(2).spawn(1)[0].generate_state(2)
    in_bag = np.unique(np.random.default_rng(boot_seed).integers(0, len(y), size=len(y)))
    assert (predict_forest(f, X[in_bag])[0] == y[in_bag]).all()
    assert (predict_tree_labels(train_tree(LabeledDataset(X, y)), X) == y).all()


def test_forest_cutoff_semantics():
    X, y = separable(60)
    f = train_forest(LabeledDataset(X, y), ForestParams(n_trees=5))
    s = forest_scores(f, X)
    assert (predict_forest(f, X, 0.7)[0] == (s >= 0.7)).all()
    unanimous = Forest([train_tree(LabeledDataset([1.0, 2.0], [1, 1]))] * 3, 1, 0)
    assert predict_forest(unanimous, np.array([[0.0]]))[1].tolist() == [1.0]


def test_resample_examples():
    y = np.array([1] * 5 + [0] * 95)
    idx = resample_indices(y, 0.5, 100, seed=4)
    assert y[idx].sum() == 50 and set(idx[y[idx] == 1]) <= set(range(5))
    same = resample_indices(y, 0.05, 100, seed=4)
    assert y[same].sum() == 5
    assert np.array_equal(idx, resample_indices(y, 0.5, 100, seed=4))


def test_adaboost_vote_arithmetic():
    buy = train_tree(LabeledDataset([1.0, 2.0], [1, 1]))
    non = train_tree(LabeledDataset([1.0, 2.0], [0, 0]))
    e = BoostedEnsemble([buy, non], [2.0, 1.0], 1)
    labels, scores = predict_adaboost(e, np.array([[0.0]]))
    assert math.isclose(scores[0], 2 / 3) and labels.tolist() == [1]
    with pytest.raises(ValueError):
        adaboost_scores(BoostedEnsemble([], [], 1), np.array([[0.0]]))


def test_adaboost_deterministic():
    X, y = noisy()
    a = train_adaboost_m1(LabeledDataset(X, y), BoostParams(seed=3))
    b = train_adaboost_m1(LabeledDataset(X, y), BoostParams(seed=3))
    assert a.learners == b.learners and a.alphas == b.alphas


def test_naive_bayes_symmetry_and_prior():
    m = train_naive_bayes(LabeledDataset([0.0, 2.0, 4.0, 6.0], [0, 0, 1, 1]))
    assert naive_bayes_scores(m, np.array([[3.0]]))[0] == pytest.approx(0.5, abs=1e-15)
    flat = train_naive_bayes(LabeledDataset([1.0, 1.0, 1.0], [1, 0, 0]))
    assert naive_bayes_scores(flat, np.array([[1.0]]))[0] == pytest.approx(1 / 3)


def test_heuristic_more_examples():
    assert heuristic_from_ratios({1: 6.0, 2: 6.0}) == (Label.BUY, [1])
    assert heuristic_from_ratios({1: 1.0, 2: 2.0}) == (Label.NON_BUY, [])
