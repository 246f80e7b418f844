"""Binary-classification metrics and the shared evaluation protocol.

The AUC here is the rank statistic: tied scores share the average of the
ranks they span, so the value equals the fraction of (positive, negative)
pairs ordered correctly, counting ties as half.
"""

from __future__ import annotations

import numpy as np


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks; tied values all receive the mean rank of their block."""
    order = np.argsort(values, kind="stable")
    sorted_vals = values[order]
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        # block [i, j] shares the average of ranks i+1 .. j+1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def roc_auc(y_true: np.ndarray, scores: np.ndarray) -> float:
    """Area under the ROC curve via the Mann-Whitney rank statistic.

    Raises ValueError when only one class is present: the quantity is
    undefined there and silently returning 0.5 would mask upstream bugs.
    """
    y = np.asarray(y_true)
    s = np.asarray(scores, dtype=np.float64)
    if y.shape != s.shape or y.ndim != 1:
        raise ValueError("y_true and scores must be 1-D arrays of equal length")
    if not np.all(np.isfinite(s)):
        raise ValueError("scores contain non-finite values")
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos + n_neg != len(y):
        raise ValueError("labels must be 0 or 1")
    if n_pos == 0 or n_neg == 0:
        raise ValueError("roc_auc is undefined with a single class")
    ranks = _average_ranks(s)
    rank_sum_pos = float(np.sum(ranks[y == 1]))
    u = rank_sum_pos - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def evaluate(
    y_true: np.ndarray,
    proba: np.ndarray,
    threshold: float = 0.5,
) -> dict:
    """Score predicted probabilities against labels at a decision threshold.

    Predictions are positive when proba >= threshold. Returns the confusion
    counts, accuracy, AUC, the positive-class precision/recall/F1, and the
    macro and support-weighted averages over both classes.
    """
    y = np.asarray(y_true)
    p = np.asarray(proba, dtype=np.float64)
    if y.shape != p.shape or y.ndim != 1:
        raise ValueError("y_true and proba must be 1-D arrays of equal length")
    pred = (p >= threshold).astype(np.int64)

    tp = int(np.sum((pred == 1) & (y == 1)))
    fp = int(np.sum((pred == 1) & (y == 0)))
    tn = int(np.sum((pred == 0) & (y == 0)))
    fn = int(np.sum((pred == 0) & (y == 1)))
    n = len(y)

    def _prf(tp_: int, fp_: int, fn_: int) -> tuple[float, float, float]:
        precision = tp_ / (tp_ + fp_) if tp_ + fp_ > 0 else 0.0
        recall = tp_ / (tp_ + fn_) if tp_ + fn_ > 0 else 0.0
        f1 = (
            2.0 * precision * recall / (precision + recall)
            if precision + recall > 0
            else 0.0
        )
        return precision, recall, f1

    # per-class views: positive class as-is, negative class with roles flipped
    prec_pos, rec_pos, f1_pos = _prf(tp, fp, fn)
    prec_neg, rec_neg, f1_neg = _prf(tn, fn, fp)
    n_pos = tp + fn
    n_neg = tn + fp

    auc = roc_auc(y, p) if 0 < n_pos < n else float("nan")
    w_pos = n_pos / n if n else 0.0
    w_neg = n_neg / n if n else 0.0

    return {
        "n": n,
        "n_positive": n_pos,
        "n_negative": n_neg,
        "threshold": float(threshold),
        "true_positive": tp,
        "false_positive": fp,
        "true_negative": tn,
        "false_negative": fn,
        "accuracy": (tp + tn) / n if n else 0.0,
        "auc": auc,
        "precision": prec_pos,
        "recall": rec_pos,
        "f1": f1_pos,
        "precision_negative": prec_neg,
        "recall_negative": rec_neg,
        "f1_negative": f1_neg,
        "precision_macro": 0.5 * (prec_pos + prec_neg),
        "recall_macro": 0.5 * (rec_pos + rec_neg),
        "f1_macro": 0.5 * (f1_pos + f1_neg),
        "precision_weighted": w_pos * prec_pos + w_neg * prec_neg,
        "recall_weighted": w_pos * rec_pos + w_neg * rec_neg,
        "f1_weighted": w_pos * f1_pos + w_neg * f1_neg,
    }


def stratified_split(
    y: np.ndarray,
    test_fraction: float = 0.2,
    seed: int = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic stratified holdout split.

    Returns (train_indices, test_indices), each sorted ascending. Within
    every class the test count is round(n_class * test_fraction), clamped
    so that both sides keep at least one member whenever the class has
    two or more.
    """
    y = np.asarray(y)
    if y.ndim != 1:
        raise ValueError("labels must be 1-D")
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must be in (0, 1)")
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(7,)))
    test_parts: list[np.ndarray] = []
    for cls in np.unique(y):
        idx = np.flatnonzero(y == cls)
        n_test = int(round(len(idx) * test_fraction))
        if len(idx) >= 2:
            n_test = min(max(n_test, 1), len(idx) - 1)
        else:
            n_test = 0
        perm = rng.permutation(len(idx))
        test_parts.append(idx[perm[:n_test]])
    test_idx = np.sort(np.concatenate(test_parts)) if test_parts else np.array([], dtype=np.int64)
    mask = np.ones(len(y), dtype=bool)
    mask[test_idx] = False
    return np.flatnonzero(mask), test_idx.astype(np.int64)
