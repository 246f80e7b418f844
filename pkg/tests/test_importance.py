import numpy as np
import pytest
from scipy.stats import binom

from veriscore.learn import GbdtConfig, all_relevant_select, gini_importance

QUICK = GbdtConfig(n_rounds=25, max_depth=3, early_stopping_rounds=0, seed=0)


def make_planted(n=400, d=8, seed=0):
    """One strong informative column, the rest pure noise."""
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, d))
    logit = 3.0 * X[:, 0]
    y = (rng.random(n) < 1.0 / (1.0 + np.exp(-logit))).astype(int)
    return X, y


class TestGiniImportance:
    def test_planted_feature_dominates(self):
        X, y = make_planted()
        rows = gini_importance(X, y, QUICK, n_repeats=15, seed=1)
        planted = rows[0]
        assert planted.times_top >= 14
        assert planted.mean_rank < 2.0
        assert planted.mean_importance == max(r.mean_importance for r in rows)

    def test_mean_importance_sums_to_one(self):
        X, y = make_planted(n=200, d=5, seed=2)
        rows = gini_importance(X, y, QUICK, n_repeats=6, seed=3)
        assert abs(sum(r.mean_importance for r in rows) - 1.0) < 1e-9

    def test_rank_sum_is_preserved(self):
        # average ranks within each repeat sum to d(d+1)/2, so means do too
        X, y = make_planted(n=200, d=6, seed=4)
        rows = gini_importance(X, y, QUICK, n_repeats=5, seed=5)
        assert abs(sum(r.mean_rank for r in rows) - 21.0) < 1e-9

    def test_deterministic(self):
        X, y = make_planted(n=150, d=4, seed=6)
        a = gini_importance(X, y, QUICK, n_repeats=4, seed=7)
        b = gini_importance(X, y, QUICK, n_repeats=4, seed=7)
        assert a == b

    def test_names_flow_through(self):
        X, y = make_planted(n=120, d=3, seed=8)
        rows = gini_importance(
            X, y, QUICK, n_repeats=2, seed=9, feature_names=["a", "b", "c"]
        )
        assert [r.feature for r in rows] == ["a", "b", "c"]

    def test_bad_repeat_count_raises(self):
        X, y = make_planted(n=50, d=2, seed=10)
        with pytest.raises(ValueError):
            gini_importance(X, y, QUICK, n_repeats=0)


class TestAllRelevantSelect:
    def test_label_copy_confirmed_noise_rejected(self):
        rng = np.random.default_rng(11)
        n = 300
        noise = rng.normal(size=(n, 3))
        y = rng.integers(0, 2, size=n)
        y[0], y[1] = 0, 1
        # column 0 is the label plus a whisper of noise, columns 1..3 are junk
        copy = y + 0.01 * rng.normal(size=n)
        X = np.column_stack([copy, noise])
        rows = all_relevant_select(X, y, QUICK, n_iter=12, seed=12)
        assert rows[0].status == "confirmed"
        assert rows[0].hits == 12
        for r in rows[1:]:
            assert r.status == "rejected"

    def test_p_value_consistent_with_hits(self):
        rng = np.random.default_rng(13)
        X = rng.normal(size=(150, 4))
        y = (X[:, 1] > 0).astype(int)
        rows = all_relevant_select(X, y, QUICK, n_iter=8, seed=14)
        for r in rows:
            p_hi = binom.sf(r.hits - 1, r.n_iter, 0.5)
            p_lo = binom.cdf(r.hits, r.n_iter, 0.5)
            expect = min(1.0, 2.0 * min(p_hi, p_lo))
            assert abs(r.p_value - expect) < 1e-12
            if r.p_value < 0.05:
                assert r.status == ("confirmed" if r.hits > 4 else "rejected")
            else:
                assert r.status == "tentative"

    def test_deterministic(self):
        rng = np.random.default_rng(15)
        X = rng.normal(size=(100, 3))
        y = (X[:, 0] > 0).astype(int)
        a = all_relevant_select(X, y, QUICK, n_iter=6, seed=16)
        b = all_relevant_select(X, y, QUICK, n_iter=6, seed=16)
        assert a == b

    def test_too_few_iterations_raise(self):
        X = np.ones((20, 2))
        y = np.arange(20) % 2
        with pytest.raises(ValueError):
            all_relevant_select(X, y, QUICK, n_iter=4)
