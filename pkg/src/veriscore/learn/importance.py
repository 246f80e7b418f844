"""Stability protocols on top of boosted-tree importance.

Two reports live here. The repeated-importance report retrains the model
many times under jittered hyperparameters and averages the normalised
gain importance and its rank per feature, so a single lucky fit cannot
dominate. The all-relevant selection report pits every real feature
against shadow copies (the same columns with rows permuted independently)
and keeps score of how often the real column beats the best shadow; a
two-sided binomial test on that count at the end labels each feature
confirmed, rejected, or tentative.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.stats import binom, rankdata

from .gbdt import GbdtConfig, train_gbdt

HYPER_GRID: dict[str, tuple[float, ...]] = {
    "colsample": (0.5, 0.7, 0.85, 1.0),
    "subsample": (0.6, 0.8, 1.0),
    "min_child_weight": (1.0, 3.0, 5.0),
}


@dataclass(frozen=True)
class ImportanceSummary:
    feature: str
    mean_importance: float
    mean_rank: float
    times_top: int


@dataclass(frozen=True)
class SelectionResult:
    feature: str
    hits: int
    n_iter: int
    p_value: float
    status: str  # confirmed | rejected | tentative


def _default_names(d: int, feature_names: list[str] | None) -> list[str]:
    if feature_names is None:
        return [f"feature_{i:03d}" for i in range(d)]
    if len(feature_names) != d:
        raise ValueError("feature_names length does not match X columns")
    return list(feature_names)


def gini_importance(
    X: np.ndarray,
    y: np.ndarray,
    base_config: GbdtConfig | None = None,
    n_repeats: int = 100,
    seed: int = 0,
    feature_names: list[str] | None = None,
    hyper_grid: dict[str, tuple[float, ...]] | None = None,
) -> list[ImportanceSummary]:
    """Average normalised gain importance over jittered retrains.

    Each repeat draws colsample, subsample, and min_child_weight from the
    grid and a fresh model seed, all from a per-repeat child stream of
    seed. Ranks within a repeat are 1-based; tied importances share the
    average rank. times_top counts repeats where the feature held the
    single highest importance (lowest index wins an exact tie).
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if n_repeats < 1:
        raise ValueError("n_repeats must be at least 1")
    d = X.shape[1]
    names = _default_names(d, feature_names)
    cfg = base_config if base_config is not None else GbdtConfig()
    grid = hyper_grid if hyper_grid is not None else HYPER_GRID

    sum_importance = np.zeros(d, dtype=np.float64)
    sum_rank = np.zeros(d, dtype=np.float64)
    times_top = np.zeros(d, dtype=np.int64)

    for rep in range(n_repeats):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=seed, spawn_key=(rep,))
        )
        draw = {k: float(rng.choice(v)) for k, v in grid.items()}
        model_cfg = replace(
            cfg,
            seed=int(rng.integers(0, 2**31 - 1)),
            **draw,
        )
        model = train_gbdt(X, y, model_cfg)
        imp = model.normalized_importance
        sum_importance += imp
        sum_rank += rankdata(-imp, method="average")
        times_top[int(np.argmax(imp))] += 1

    return [
        ImportanceSummary(
            feature=names[i],
            mean_importance=float(sum_importance[i] / n_repeats),
            mean_rank=float(sum_rank[i] / n_repeats),
            times_top=int(times_top[i]),
        )
        for i in range(d)
    ]


def all_relevant_select(
    X: np.ndarray,
    y: np.ndarray,
    base_config: GbdtConfig | None = None,
    n_iter: int = 100,
    alpha: float = 0.05,
    seed: int = 0,
    feature_names: list[str] | None = None,
) -> list[SelectionResult]:
    """Shadow-feature relevance screening with an end-of-run binomial test.

    Per iteration every real column gets a shadow: the same values with
    rows permuted independently per column, which kills any association
    with the label while keeping the marginal distribution. A hit is a
    real feature whose importance exceeds the best shadow importance in
    that iteration's fit on [X | shadows]. After all iterations the hit
    count is tested against Binomial(n_iter, 1/2), two-sided:
    p < alpha with more hits than misses confirms the feature, p < alpha
    with fewer rejects it, anything else stays tentative.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if n_iter < 5:
        raise ValueError("n_iter must be at least 5 for the binomial decision")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    n, d = X.shape
    names = _default_names(d, feature_names)
    cfg = base_config if base_config is not None else GbdtConfig()

    hits = np.zeros(d, dtype=np.int64)
    for it in range(n_iter):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=seed, spawn_key=(it,))
        )
        shadows = np.empty_like(X)
        for j in range(d):
            shadows[:, j] = X[rng.permutation(n), j]
        augmented = np.hstack([X, shadows])
        model_cfg = replace(cfg, seed=int(rng.integers(0, 2**31 - 1)))
        model = train_gbdt(augmented, y, model_cfg)
        imp = model.normalized_importance
        shadow_best = float(imp[d:].max())
        hits += imp[:d] > shadow_best

    p_high = binom.sf(hits - 1, n_iter, 0.5)  # P(at least this many hits)
    p_low = binom.cdf(hits, n_iter, 0.5)
    p_two = np.minimum(1.0, 2.0 * np.minimum(p_high, p_low))

    results = []
    for i in range(d):
        if p_two[i] < alpha and hits[i] > n_iter / 2:
            status = "confirmed"
        elif p_two[i] < alpha and hits[i] < n_iter / 2:
            status = "rejected"
        else:
            status = "tentative"
        results.append(
            SelectionResult(
                feature=names[i],
                hits=int(hits[i]),
                n_iter=n_iter,
                p_value=float(p_two[i]),
                status=status,
            )
        )
    return results
