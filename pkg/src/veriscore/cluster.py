"""K-means clustering with D^2 seeding, knee-based k choice, and profiles.

Lloyd's iterations are recorded as an inertia trace so the monotone
descent of the algorithm is checkable from the outside. The returned
assignment is always recomputed from the returned centroids, making
(centroids, assignment) a genuine fixpoint pair: re-assigning changes
nothing.

Choosing k runs best-of-n_seeds Lloyd per candidate and picks the knee
of the inertia curve, the interior candidate with the largest second
difference. When even the largest second difference is small next to
the overall inertia drop there is no clear knee; the report says so
instead of pretending.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .learn.metrics import roc_auc

KNEE_FLAT_FRACTION = 0.10
MIN_HELDOUT_FOR_METRICS = 10


@dataclass(frozen=True)
class KMeansResult:
    centroids: np.ndarray
    assignment: np.ndarray
    inertia: float
    inertia_trace: tuple[float, ...]
    n_iter: int
    converged: bool


@dataclass(frozen=True)
class ChooseKReport:
    k_values: tuple[int, ...]
    inertias: tuple[float, ...]
    second_differences: tuple[float, ...]
    chosen_k: int
    variance_explained: float
    no_clear_knee: bool
    total_sum_squares: float


def _pairwise_sq_dists(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    # ||x - c||^2 expanded; clamp tiny negatives from cancellation
    d2 = (
        np.sum(X * X, axis=1)[:, None]
        - 2.0 * X @ C.T
        + np.sum(C * C, axis=1)[None, :]
    )
    return np.maximum(d2, 0.0)


def kmeanspp_init(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """D^2-weighted seeding: first centre uniform, later centres drawn with
    probability proportional to squared distance from the nearest chosen one.
    """
    n = len(X)
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > len(np.unique(X, axis=0)):
        raise ValueError("k exceeds the number of distinct points")
    centroids = np.empty((k, X.shape[1]), dtype=np.float64)
    centroids[0] = X[int(rng.integers(n))]
    d2 = _pairwise_sq_dists(X, centroids[:1])[:, 0]
    for j in range(1, k):
        total = float(d2.sum())
        probs = d2 / total
        idx = int(rng.choice(n, p=probs))
        centroids[j] = X[idx]
        d2 = np.minimum(d2, _pairwise_sq_dists(X, centroids[j : j + 1])[:, 0])
    return centroids


def lloyd(
    X: np.ndarray,
    k: int,
    seed: int = 0,
    max_iter: int = 300,
    tol: float = 1e-6,
) -> KMeansResult:
    """Lloyd's algorithm from a D^2 seeding.

    Stops when the assignment stabilises or no centroid moved more than
    tol. An emptied cluster is reseeded at the point currently farthest
    from its assigned centroid, which cannot increase inertia because the
    following assignment step only ever moves points to closer centroids.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or len(X) == 0:
        raise ValueError("X must be a non-empty 2-D array")
    if not np.all(np.isfinite(X)):
        raise ValueError("X contains non-finite values")
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed))
    centroids = kmeanspp_init(X, k, rng)
    d2 = _pairwise_sq_dists(X, centroids)
    assignment = np.argmin(d2, axis=1)
    trace = [float(d2[np.arange(len(X)), assignment].sum())]

    converged = False
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        new_centroids = centroids.copy()
        for c in range(k):
            members = assignment == c
            if members.any():
                new_centroids[c] = X[members].mean(axis=0)
        empty = [c for c in range(k) if not np.any(assignment == c)]
        if empty:
            dist_own = _pairwise_sq_dists(X, new_centroids)[
                np.arange(len(X)), assignment
            ]
            # hand each empty cluster its own farthest point, without reuse
            order = np.argsort(-dist_own, kind="stable")
            for rank, c in enumerate(empty):
                new_centroids[c] = X[order[rank]]

        d2 = _pairwise_sq_dists(X, new_centroids)
        new_assignment = np.argmin(d2, axis=1)
        trace.append(float(d2[np.arange(len(X)), new_assignment].sum()))
        shift = float(np.max(np.sqrt(np.sum((new_centroids - centroids) ** 2, axis=1))))
        stable = bool(np.array_equal(new_assignment, assignment))
        centroids = new_centroids
        assignment = new_assignment
        if stable or shift <= tol:
            converged = True
            break

    # fixpoint guarantee: assignment always belongs to the final centroids
    d2 = _pairwise_sq_dists(X, centroids)
    assignment = np.argmin(d2, axis=1)
    inertia = float(d2[np.arange(len(X)), assignment].sum())
    return KMeansResult(
        centroids=centroids,
        assignment=assignment.astype(np.int64),
        inertia=inertia,
        inertia_trace=tuple(trace),
        n_iter=n_iter,
        converged=converged,
    )


def knee_from_inertias(
    k_values: tuple[int, ...] | list[int],
    inertias: tuple[float, ...] | list[float],
) -> tuple[int, tuple[float, ...], bool]:
    """Pick the interior k with the largest second difference of inertia.

    Returns (chosen_k, second_differences, no_clear_knee). The flag is set
    when the best second difference is below KNEE_FLAT_FRACTION of the
    total inertia drop, i.e. the curve bends nowhere in particular.
    """
    ks = list(k_values)
    inert = list(inertias)
    if len(ks) < 3:
        raise ValueError("need at least three candidate k values to find a knee")
    if sorted(set(ks)) != ks:
        raise ValueError("k values must be strictly increasing")
    dd = tuple(
        inert[i - 1] - 2.0 * inert[i] + inert[i + 1] for i in range(1, len(ks) - 1)
    )
    best = int(np.argmax(dd))
    chosen = ks[best + 1]
    total_drop = inert[0] - inert[-1]
    no_clear_knee = bool(max(dd) < KNEE_FLAT_FRACTION * total_drop) if total_drop > 0 else True
    return chosen, dd, no_clear_knee


def choose_k(
    X: np.ndarray,
    k_values: list[int],
    seed: int = 0,
    n_seeds: int = 10,
) -> ChooseKReport:
    """Run best-of-n_seeds Lloyd for every candidate k and pick the knee."""
    X = np.asarray(X, dtype=np.float64)
    ks = sorted(set(int(k) for k in k_values))
    if len(ks) < 3:
        raise ValueError("need at least three candidate k values to find a knee")
    inertias = []
    for ki in ks:
        best = float("inf")
        for s in range(n_seeds):
            child = int(
                np.random.SeedSequence(entropy=seed, spawn_key=(ki, s)).generate_state(1)[0]
            )
            best = min(best, lloyd(X, ki, seed=child).inertia)
        inertias.append(best)
    chosen, dd, flat = knee_from_inertias(ks, inertias)
    mean = X.mean(axis=0)
    tss = float(np.sum((X - mean) ** 2))
    chosen_inertia = inertias[ks.index(chosen)]
    variance_explained = 1.0 - chosen_inertia / tss if tss > 0 else 0.0
    return ChooseKReport(
        k_values=tuple(ks),
        inertias=tuple(inertias),
        second_differences=dd,
        chosen_k=chosen,
        variance_explained=variance_explained,
        no_clear_knee=flat,
        total_sum_squares=tss,
    )


def select_top_features(mean_ranks: np.ndarray, top_n: int) -> np.ndarray:
    """Indices of the top_n features by mean rank, best first.

    Ties resolve to the lower feature index.
    """
    ranks = np.asarray(mean_ranks, dtype=np.float64)
    order = np.lexsort((np.arange(len(ranks)), ranks))
    return order[: min(top_n, len(ranks))]


def zscore(
    X: np.ndarray,
    unit_norm: bool = False,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Column z-scores; constant columns get scale 1. With unit_norm each
    row is additionally scaled to unit length (zero rows stay zero).
    """
    X = np.asarray(X, dtype=np.float64)
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale = np.where(scale > 0.0, scale, 1.0)
    Z = (X - mean) / scale
    if unit_norm:
        norms = np.sqrt(np.sum(Z * Z, axis=1))
        norms = np.where(norms > 0.0, norms, 1.0)
        Z = Z / norms[:, None]
    return Z, mean, scale


def characterize_clusters(
    X: np.ndarray,
    feature_names: list[str],
    y: np.ndarray,
    proba: np.ndarray,
    assignment: np.ndarray,
    heldout_mask: np.ndarray,
) -> list[dict]:
    """Per-cluster profile: raw feature means/medians, verified fraction,
    a decile histogram of predicted probabilities, and model quality on
    the cluster's held-out members.

    Held-out accuracy and AUC are suppressed (None) for clusters with
    fewer than MIN_HELDOUT_FOR_METRICS held-out members; the AUC is also
    None when the held-out members are single-class.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    proba = np.asarray(proba, dtype=np.float64)
    assignment = np.asarray(assignment)
    heldout_mask = np.asarray(heldout_mask, dtype=bool)
    if len(feature_names) != X.shape[1]:
        raise ValueError("feature_names length does not match X columns")
    edges = np.linspace(0.0, 1.0, 11)

    profiles = []
    for c in sorted(int(v) for v in np.unique(assignment)):
        members = assignment == c
        held = members & heldout_mask
        n_held = int(held.sum())
        accuracy = None
        auc = None
        if n_held >= MIN_HELDOUT_FOR_METRICS:
            accuracy = float(np.mean((proba[held] >= 0.5) == y[held]))
            if 0 < int(y[held].sum()) < n_held:
                auc = float(roc_auc(y[held], proba[held]))
        counts, _ = np.histogram(proba[members], bins=edges)
        profiles.append(
            {
                "cluster": c,
                "size": int(members.sum()),
                "verified_fraction": float(np.mean(y[members])),
                "feature_means": {
                    name: float(v)
                    for name, v in zip(feature_names, X[members].mean(axis=0))
                },
                "feature_medians": {
                    name: float(v)
                    for name, v in zip(feature_names, np.median(X[members], axis=0))
                },
                "proba_decile_counts": [int(v) for v in counts],
                "n_heldout": n_held,
                "heldout_accuracy": accuracy,
                "heldout_auc": auc,
                "insufficient_heldout": n_held < MIN_HELDOUT_FOR_METRICS,
            }
        )
    return profiles


def pca_2d(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Project rows onto the top two principal axes.

    Sign convention: each axis is flipped so its largest-magnitude loading
    is positive, which makes the projection independent of SVD backend
    quirks. Returns (coords of shape (n, 2), explained variance ratios).
    """
    X = np.asarray(X, dtype=np.float64)
    centered = X - X.mean(axis=0)
    u, s, vt = np.linalg.svd(centered, full_matrices=False)
    coords = np.zeros((len(X), 2), dtype=np.float64)
    ratios = np.zeros(2, dtype=np.float64)
    total = float(np.sum(s * s))
    for axis in range(min(2, vt.shape[0])):
        if s[axis] <= 0.0:
            break
        load = vt[axis]
        j = int(np.argmax(np.abs(load)))
        flip = -1.0 if load[j] < 0 else 1.0
        coords[:, axis] = flip * u[:, axis] * s[axis]
        ratios[axis] = s[axis] * s[axis] / total if total > 0 else 0.0
    return coords, ratios
