import json
import math

import numpy as np
import pytest

from veriscore.learn import (
    GbdtConfig,
    evaluate,
    logistic_loss_and_grad,
    roc_auc,
    stratified_split,
    train_gbdt,
    train_logistic,
)
from veriscore.learn.gbdt import BoostedTreesModel, _best_split
from veriscore.learn.logistic import LogisticModel


def oracle_pairwise_auc(y, s):
    """Fraction of (positive, negative) pairs ranked correctly, ties half."""
    pos = [float(v) for v in s[y == 1]]
    neg = [float(v) for v in s[y == 0]]
    total = 0.0
    for a in pos:
        for b in neg:
            if a > b:
                total += 1.0
            elif a == b:
                total += 0.5
    return total / (len(pos) * len(neg))


class TestRocAuc:
    def test_matches_pairwise_concordance(self):
        rng = np.random.default_rng(42)
        for _ in range(50):
            n = int(rng.integers(5, 60))
            y = rng.integers(0, 2, size=n)
            if y.min() == y.max():
                y[0] = 1 - y[0]
            # coarse score grid so tied scores actually occur
            s = rng.integers(0, 8, size=n) / 7.0
            assert abs(roc_auc(y, s) - oracle_pairwise_auc(y, s)) < 1e-9

    def test_perfect_and_reversed(self):
        y = np.array([0, 0, 1, 1])
        s = np.array([0.1, 0.2, 0.8, 0.9])
        assert roc_auc(y, s) == 1.0
        assert roc_auc(y, -s) == 0.0

    def test_all_tied_is_half(self):
        y = np.array([0, 1, 0, 1, 1])
        s = np.full(5, 0.3)
        assert abs(roc_auc(y, s) - 0.5) < 1e-12

    def test_single_class_raises(self):
        with pytest.raises(ValueError):
            roc_auc(np.ones(4), np.linspace(0, 1, 4))

    def test_non_finite_scores_raise(self):
        with pytest.raises(ValueError):
            roc_auc(np.array([0, 1]), np.array([0.2, np.nan]))


class TestEvaluate:
    def test_hand_computed_confusion(self):
        y = np.array([1, 1, 0, 0, 1])
        p = np.array([0.9, 0.4, 0.6, 0.1, 0.5])
        m = evaluate(y, p)
        assert (m["true_positive"], m["false_negative"]) == (2, 1)
        assert (m["false_positive"], m["true_negative"]) == (1, 1)
        assert abs(m["accuracy"] - 0.6) < 1e-12
        assert abs(m["precision"] - 2 / 3) < 1e-12
        assert abs(m["recall"] - 2 / 3) < 1e-12
        assert abs(m["f1"] - 2 / 3) < 1e-12
        assert abs(m["f1_negative"] - 0.5) < 1e-12
        assert abs(m["f1_macro"] - (2 / 3 + 0.5) / 2) < 1e-12
        assert abs(m["f1_weighted"] - (0.6 * 2 / 3 + 0.4 * 0.5)) < 1e-12

    def test_threshold_equality_is_positive(self):
        m = evaluate(np.array([0]), np.array([0.5]))
        assert m["false_positive"] == 1
        assert math.isnan(m["auc"])

    def test_auc_field_matches_function(self):
        rng = np.random.default_rng(3)
        y = rng.integers(0, 2, size=40)
        y[0], y[1] = 0, 1
        p = rng.random(40)
        assert evaluate(y, p)["auc"] == roc_auc(y, p)


class TestStratifiedSplit:
    def test_partition_and_proportions(self):
        y = np.array([0] * 80 + [1] * 20)
        train, test = stratified_split(y, 0.25, seed=5)
        assert sorted(np.concatenate([train, test])) == list(range(100))
        assert np.sum(y[test] == 0) == 20
        assert np.sum(y[test] == 1) == 5

    def test_deterministic(self):
        y = np.arange(60) % 2
        a = stratified_split(y, 0.2, seed=9)
        b = stratified_split(y, 0.2, seed=9)
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])

    def test_singleton_class_stays_in_train(self):
        y = np.array([0] * 30 + [1])
        train, test = stratified_split(y, 0.5, seed=0)
        assert 30 in train

    def test_bad_fraction_raises(self):
        with pytest.raises(ValueError):
            stratified_split(np.array([0, 1]), 1.0)


class TestLogistic:
    def test_gradient_matches_central_differences(self):
        # independent oracle: symmetric difference quotient per coordinate
        rng = np.random.default_rng(7)
        X = rng.normal(size=(24, 4))
        y = rng.integers(0, 2, size=24).astype(np.float64)
        l2 = 1e-3
        for _ in range(10):
            w = rng.normal(scale=1.5, size=4)
            b = float(rng.normal(scale=1.5))
            _, gw, gb = logistic_loss_and_grad(w, b, X, y, l2)
            analytic = np.concatenate([gw, [gb]])
            fd = np.empty(5)
            for i in range(5):
                eps = 1e-6 * max(1.0, abs((list(w) + [b])[i]))
                wp, bp = w.copy(), b
                wm, bm = w.copy(), b
                if i < 4:
                    wp[i] += eps
                    wm[i] -= eps
                else:
                    bp += eps
                    bm -= eps
                lp, _, _ = logistic_loss_and_grad(wp, bp, X, y, l2)
                lm, _, _ = logistic_loss_and_grad(wm, bm, X, y, l2)
                fd[i] = (lp - lm) / (2 * eps)
            rel = np.linalg.norm(fd - analytic) / max(np.linalg.norm(analytic), 1e-12)
            assert rel < 1e-5

    def test_separable_blobs(self):
        rng = np.random.default_rng(11)
        X = np.vstack(
            [rng.normal(-2, 0.5, size=(60, 2)), rng.normal(2, 0.5, size=(60, 2))]
        )
        y = np.array([0] * 60 + [1] * 60)
        model = train_logistic(X, y)
        acc = np.mean((model.predict_proba(X) >= 0.5) == y)
        assert acc >= 0.99
        assert not model.degenerate

    def test_scale_invariance_of_predictions(self):
        rng = np.random.default_rng(13)
        X = rng.normal(size=(80, 3))
        y = (X[:, 0] + 0.3 * rng.normal(size=80) > 0).astype(int)
        X2 = X.copy()
        X2[:, 1] *= 1000.0
        p1 = train_logistic(X, y).predict_proba(X)
        p2 = train_logistic(X2, y).predict_proba(X2)
        assert np.allclose(p1, p2, atol=1e-6)

    def test_single_class_degenerate(self):
        X = np.ones((5, 2))
        model = train_logistic(X, np.ones(5))
        assert model.degenerate
        assert np.all(model.weights == 0.0)
        assert np.all(model.predict_proba(X) > 0.999)

    def test_round_trip_serialization(self):
        rng = np.random.default_rng(17)
        X = rng.normal(size=(40, 3))
        y = rng.integers(0, 2, size=40)
        y[0], y[1] = 0, 1
        model = train_logistic(X, y)
        blob = json.dumps(model.to_json(), sort_keys=True)
        back = LogisticModel.from_json(json.loads(blob))
        assert np.array_equal(back.predict_proba(X), model.predict_proba(X))

    def test_bad_labels_raise(self):
        with pytest.raises(ValueError):
            train_logistic(np.ones((3, 1)), np.array([0, 1, 2]))

    def test_non_finite_features_raise(self):
        X = np.ones((4, 2))
        X[0, 0] = np.inf
        with pytest.raises(ValueError):
            train_logistic(X, np.array([0, 1, 0, 1]))


def oracle_best_gain(X, g, h, l2, gamma, mcw):
    """Exhaustive scan over every midpoint threshold of every column."""
    g_total, h_total = g.sum(), h.sum()
    parent = g_total * g_total / (h_total + l2)
    best = None
    for col in range(X.shape[1]):
        vals = np.unique(X[:, col])
        for a, b in zip(vals[:-1], vals[1:]):
            left = X[:, col] <= (a + b) / 2
            gl, hl = g[left].sum(), h[left].sum()
            gr, hr = g_total - gl, h_total - hl
            if hl < mcw or hr < mcw:
                continue
            gain = 0.5 * (gl * gl / (hl + l2) + gr * gr / (hr + l2) - parent) - gamma
            if best is None or gain > best:
                best = gain
    return best


class TestGbdtSplit:
    def test_matches_bruteforce_oracle(self):
        rng = np.random.default_rng(23)
        for trial in range(40):
            m = int(rng.integers(4, 25))
            d = int(rng.integers(1, 5))
            X = rng.integers(0, 5, size=(m, d)).astype(np.float64)
            g = rng.normal(size=m)
            h = rng.uniform(0.05, 0.3, size=m)
            gamma = 0.3 if trial % 3 == 0 else 0.0
            mcw = 0.6 if trial % 2 == 0 else 0.0
            found = _best_split(X, g, h, 1.0, gamma, mcw)
            oracle = oracle_best_gain(X, g, h, 1.0, gamma, mcw)
            if found is None:
                assert oracle is None or oracle < 0.0
            else:
                assert oracle is not None
                assert abs(found[2] - oracle) < 1e-9

    def test_accepts_zero_gain_split(self):
        # balanced parity node: every split has exactly zero gain
        X = np.array([[0.0], [0.0], [1.0], [1.0]])
        g = np.array([0.5, -0.5, -0.5, 0.5])
        h = np.full(4, 0.25)
        found = _best_split(X, g, h, 1.0, 0.0, 0.0)
        assert found is not None
        assert abs(found[2]) < 1e-12


class TestGbdt:
    def test_xor_needs_interactions(self):
        # parity target: trees get it exactly, a linear model cannot
        reps = 100
        base = np.array([[0, 0], [0, 1], [1, 0], [1, 1]], dtype=np.float64)
        X = np.repeat(base, reps, axis=0)
        y = np.repeat(np.array([0, 1, 1, 0]), reps)
        gb = train_gbdt(X, y, GbdtConfig(n_rounds=60, max_depth=3, seed=1))
        assert np.mean((gb.predict_proba(X) >= 0.5) == y) == 1.0
        lr = train_logistic(X, y)
        assert np.mean((lr.predict_proba(X) >= 0.5) == y) <= 0.55

    def test_train_loss_non_increasing(self):
        rng = np.random.default_rng(29)
        X = np.vstack(
            [rng.normal(-1, 1.2, size=(150, 5)), rng.normal(1, 1.2, size=(150, 5))]
        )
        y = np.array([0] * 150 + [1] * 150)
        model = train_gbdt(X, y, GbdtConfig(n_rounds=80, seed=2))
        trace = np.array(model.train_loss)
        assert np.all(np.diff(trace) <= 1e-10)

    def test_deterministic_given_config(self):
        rng = np.random.default_rng(31)
        X = rng.normal(size=(120, 6))
        y = (X[:, 0] + X[:, 1] > 0).astype(int)
        cfg = GbdtConfig(n_rounds=25, subsample=0.8, colsample=0.7, seed=77)
        a = train_gbdt(X, y, cfg).to_json()
        b = train_gbdt(X, y, cfg).to_json()
        assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)

    def test_early_stopping_truncates_to_best(self):
        rng = np.random.default_rng(37)
        X = rng.normal(size=(90, 3))
        y = rng.integers(0, 2, size=90)
        y[0], y[1] = 0, 1
        cfg = GbdtConfig(n_rounds=300, max_depth=4, early_stopping_rounds=10, seed=3)
        model = train_gbdt(X, y, cfg)
        assert model.stopped_early
        assert len(model.trees) == model.best_iteration + 1
        assert len(model.trees) < 300

    def test_constant_features_warn_and_fall_back(self):
        X = np.full((40, 3), 2.5)
        y = np.array([0, 1] * 20)
        with pytest.warns(RuntimeWarning):
            model = train_gbdt(X, y, GbdtConfig(n_rounds=3, early_stopping_rounds=0))
        p = model.predict_proba(X)
        assert np.allclose(p, p[0])
        assert np.allclose(model.normalized_importance, 1 / 3)

    def test_importance_sums_to_one(self):
        rng = np.random.default_rng(41)
        X = rng.normal(size=(100, 4))
        y = (X[:, 2] > 0).astype(int)
        model = train_gbdt(X, y, GbdtConfig(n_rounds=15, seed=4))
        assert abs(model.normalized_importance.sum() - 1.0) < 1e-9
        assert np.argmax(model.normalized_importance) == 2

    def test_round_trip_serialization(self):
        rng = np.random.default_rng(43)
        X = rng.normal(size=(80, 3))
        y = (X[:, 0] > 0.2).astype(int)
        model = train_gbdt(X, y, GbdtConfig(n_rounds=10, seed=5))
        blob = json.dumps(model.to_json(), sort_keys=True)
        back = BoostedTreesModel.from_json(json.loads(blob))
        assert np.array_equal(back.predict_proba(X), model.predict_proba(X))

    def test_single_class_raises(self):
        with pytest.raises(ValueError):
            train_gbdt(np.ones((6, 2)), np.zeros(6))

    def test_width_mismatch_on_predict_raises(self):
        rng = np.random.default_rng(47)
        X = rng.normal(size=(30, 2))
        y = (X[:, 0] > 0).astype(int)
        model = train_gbdt(X, y, GbdtConfig(n_rounds=5))
        with pytest.raises(ValueError):
            model.predict_proba(np.ones((4, 3)))
