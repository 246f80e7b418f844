"""Class rebalancing: exact kNN, SMOTE, ADASYN and Tomek-link cleaning.

All distance work happens on internally standardized copies (z-scored per
column, zero-variance columns left at scale 1); synthetic rows are emitted
in the original feature space. Interpolation commutes with the affine
standardization, so segment membership holds in both spaces.

Determinism: every minority row owns a child seed stream derived by
counter mode from the run seed and the row's rank in a canonical
(lexicographic) ordering, so row-permuted inputs yield the same synthetic
multiset.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PROV_ORIGINAL = "original"


@dataclass
class LabeledDataset:
    X: np.ndarray
    y: np.ndarray
    provenance: np.ndarray  # (n,) unicode, "original" or the producing resampler

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.int64)
        self.provenance = np.asarray(self.provenance, dtype="U16")
        if self.X.ndim != 2 or self.y.shape != (self.X.shape[0],):
            raise ValueError("X must be (n, d) and y (n,)")
        if self.provenance.shape != self.y.shape:
            raise ValueError("provenance must align with y")


def _child_rng(seed: int, rank: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(rank,)))


def _standardize(X: np.ndarray) -> np.ndarray:
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale = np.where(scale == 0.0, 1.0, scale)
    return (X - mean) / scale


def _canonical_order(rows: np.ndarray) -> np.ndarray:
    """Ranks rows lexicographically by feature values (ties keep row order)."""
    return np.lexsort(rows.T[::-1])


def _check_binary(y: np.ndarray):
    classes = np.unique(y)
    if classes.size != 2:
        raise ValueError(f"need exactly two classes, got {classes.size}")
    return classes


def _class_split(y: np.ndarray):
    """Returns (minority_label, majority_label); ties are an error."""
    classes = _check_binary(y)
    counts = np.array([(y == c).sum() for c in classes])
    if counts[0] == counts[1]:
        raise ValueError("classes are balanced; no minority class")
    order = np.argsort(counts)
    return classes[order[0]], classes[order[1]]


def knn(
    X: np.ndarray,
    query_indices: np.ndarray,
    k: int,
    y: np.ndarray | None = None,
    same_class_only: bool = False,
) -> np.ndarray:
    """Exact k nearest neighbors by Euclidean distance on standardized X.

    Self is excluded; distance ties break toward the lower row index.

    Returns:
        (len(query_indices), k) array of neighbor row indices.
    """
    X = np.asarray(X, dtype=np.float64)
    query_indices = np.asarray(query_indices, dtype=np.intp)
    if k < 1:
        raise ValueError("k must be >= 1")
    if same_class_only and y is None:
        raise ValueError("same_class_only requires labels")
    Xs = _standardize(X)
    n = Xs.shape[0]
    out = np.empty((query_indices.size, k), dtype=np.intp)
    sq_norms = np.einsum("ij,ij->i", Xs, Xs)
    for row, qi in enumerate(query_indices):
        d2 = sq_norms - 2.0 * (Xs @ Xs[qi]) + sq_norms[qi]
        d2[qi] = np.inf
        if same_class_only:
            d2[y != y[qi]] = np.inf
        if np.isfinite(d2).sum() < k:
            raise ValueError(f"fewer than k={k} eligible neighbors for row {qi}")
        order = np.argsort(d2, kind="stable")
        out[row] = order[:k]
    return out


def smote_sample(
    X: np.ndarray,
    y: np.ndarray,
    n_needed: int,
    k: int = 5,
    seed: int = 0,
) -> np.ndarray:
    """Generate n_needed minority synthetics by segment interpolation.

    Each synthetic is x_i + lam * (x_z - x_i) with lam ~ U[0, 1] and x_z
    one of x_i's k nearest minority neighbors; donors rotate round-robin
    through the minority rows in canonical order.
    """
    if n_needed < 0:
        raise ValueError("n_needed must be >= 0")
    X = np.asarray(X, dtype=np.float64)
    if n_needed == 0:
        return np.zeros((0, X.shape[1]), dtype=np.float64)
    minority_label, _ = _class_split(y)
    minority_idx = np.flatnonzero(y == minority_label)
    m = minority_idx.size
    if m <= k:
        raise ValueError(f"minority count {m} must exceed k={k}")

    canon = minority_idx[_canonical_order(X[minority_idx])]
    neighbor_rows = knn(X, canon, k, y=y, same_class_only=True)

    # per-donor draw counts under round-robin assignment
    counts = np.full(m, n_needed // m, dtype=np.intp)
    counts[: n_needed % m] += 1

    draws = []  # draws[rank] = list of (neighbor_slot, lam)
    for rank in range(m):
        rng = _child_rng(seed, rank)
        draws.append(
            [(int(rng.integers(0, k)), float(rng.random())) for _ in range(counts[rank])]
        )

    synth = np.empty((n_needed, X.shape[1]), dtype=np.float64)
    for j in range(n_needed):
        rank = j % m
        slot, lam = draws[rank][j // m]
        xi = X[canon[rank]]
        xz = X[neighbor_rows[rank, slot]]
        synth[j] = xi + lam * (xz - xi)
    return synth


def adasyn_sample(
    X: np.ndarray,
    y: np.ndarray,
    beta: float = 1.0,
    k: int = 5,
    seed: int = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """Density-adaptive minority synthesis.

    G = (m_l - m_s) * beta synthetics are allocated over minority points
    proportionally to r_i = (majority neighbors among the k nearest of any
    class) / k, normalized; g_i = round(rhat_i * G). When every r_i is 0
    the allocation falls back to uniform. Interpolation donors are the k
    nearest minority neighbors.

    Returns:
        (synthetics, allocation) where allocation[i] counts synthetics for
        the i-th minority row in dataset order.
    """
    if not 0.0 <= beta <= 1.0:
        raise ValueError("beta must be in [0, 1]")
    X = np.asarray(X, dtype=np.float64)
    minority_label, majority_label = _class_split(y)
    minority_idx = np.flatnonzero(y == minority_label)
    m_s = minority_idx.size
    m_l = int((y == majority_label).sum())
    if m_s <= k:
        raise ValueError(f"minority count {m_s} must exceed k={k}")

    G = (m_l - m_s) * beta

    canon = minority_idx[_canonical_order(X[minority_idx])]
    any_class_nn = knn(X, canon, k)
    r = (y[any_class_nn] == majority_label).sum(axis=1) / float(k)
    if r.sum() == 0.0:
        rhat = np.full(m_s, 1.0 / m_s)
    else:
        rhat = r / r.sum()
    g = np.rint(rhat * G).astype(np.intp)

    minority_nn = knn(X, canon, k, y=y, same_class_only=True)
    chunks = []
    for rank in range(m_s):
        if g[rank] == 0:
            continue
        rng = _child_rng(seed, rank)
        xi = X[canon[rank]]
        for _ in range(g[rank]):
            slot = int(rng.integers(0, k))
            lam = float(rng.random())
            chunks.append(xi + lam * (X[minority_nn[rank, slot]] - xi))
    synth = np.array(chunks, dtype=np.float64) if chunks else np.zeros((0, X.shape[1]))

    allocation = np.zeros(m_s, dtype=np.intp)
    dataset_rank = {int(row): i for i, row in enumerate(minority_idx)}
    for rank in range(m_s):
        allocation[dataset_rank[int(canon[rank])]] = g[rank]
    return synth, allocation


def tomek_links(X: np.ndarray, y: np.ndarray) -> list[tuple[int, int]]:
    """Mutual-1NN pairs with opposite labels, as (i, j) with i < j."""
    X = np.asarray(X, dtype=np.float64)
    _check_binary(y)
    nn = knn(X, np.arange(X.shape[0]), 1)[:, 0]
    links = []
    for i, j in enumerate(nn):
        j = int(j)
        if j > i and int(nn[j]) == i and y[i] != y[j]:
            links.append((i, j))
    return links


def smote_tomek(
    X: np.ndarray,
    y: np.ndarray,
    k: int = 5,
    seed: int = 0,
) -> LabeledDataset:
    """SMOTE up to balance, then one pass of Tomek-link cleaning that
    removes the majority-class member of each link. Minority rows
    (original or synthetic) are never removed."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    classes = _check_binary(y)
    counts = {int(c): int((y == c).sum()) for c in classes}
    if counts[int(classes[0])] == counts[int(classes[1])]:
        minority_label = None
        synth = np.zeros((0, X.shape[1]))
    else:
        minority_label, majority_label = _class_split(y)
        n_needed = counts[int(majority_label)] - counts[int(minority_label)]
        synth = smote_sample(X, y, n_needed, k=k, seed=seed)

    X_aug = np.vstack([X, synth])
    y_aug = np.concatenate([y, np.full(synth.shape[0], minority_label, dtype=np.int64)])
    prov = np.concatenate(
        [np.full(X.shape[0], PROV_ORIGINAL, dtype="U16"), np.full(synth.shape[0], "smote", dtype="U16")]
    )

    if minority_label is not None:
        keep = np.ones(X_aug.shape[0], dtype=bool)
        for i, j in tomek_links(X_aug, y_aug):
            victim = i if y_aug[i] == majority_label else j
            keep[victim] = False
        X_aug, y_aug, prov = X_aug[keep], y_aug[keep], prov[keep]
    return LabeledDataset(X=X_aug, y=y_aug, provenance=prov)


def adasyn_dataset(X: np.ndarray, y: np.ndarray, beta: float = 1.0, k: int = 5, seed: int = 0) -> LabeledDataset:
    synth, _ = adasyn_sample(X, y, beta=beta, k=k, seed=seed)
    minority_label, _ = _class_split(y)
    return LabeledDataset(
        X=np.vstack([X, synth]),
        y=np.concatenate([y, np.full(synth.shape[0], minority_label, dtype=np.int64)]),
        provenance=np.concatenate(
            [np.full(X.shape[0], PROV_ORIGINAL, dtype="U16"), np.full(synth.shape[0], "adasyn", dtype="U16")]
        ),
    )


def rebalance_dataset(
    X: np.ndarray,
    y: np.ndarray,
    method: str,
    k: int = 5,
    beta: float = 1.0,
    seed: int = 0,
) -> LabeledDataset:
    """Dispatch for the pipeline: method is none, adasyn or smotetomek."""
    if method == "none":
        return LabeledDataset(
            X=np.asarray(X, dtype=np.float64).copy(),
            y=np.asarray(y, dtype=np.int64).copy(),
            provenance=np.full(len(y), PROV_ORIGINAL, dtype="U16"),
        )
    if method == "adasyn":
        return adasyn_dataset(X, y, beta=beta, k=k, seed=seed)
    if method == "smotetomek":
        return smote_tomek(X, y, k=k, seed=seed)
    raise ValueError(f"unknown rebalance method {method!r}")
