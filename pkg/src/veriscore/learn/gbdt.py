"""Gradient-boosted decision trees for binary labels with logistic loss.

Trees are grown greedily on second-order statistics: with gradient and
hessian sums (G, H) the leaf weight is -G/(H + l2) and a split's gain is

    0.5 * (GL^2/(HL+l2) + GR^2/(HR+l2) - G^2/(H+l2)) - gamma

The best split is accepted whenever its gain is >= 0 and both children
carry at least min_child_weight of hessian mass. Accepting zero-gain
splits matters: on parity-style targets the root split is exactly
gain-free yet the children become separable, and a zero gain adds
nothing to the importance totals.

All randomness (validation split, row subsampling, column subsampling)
derives from the config seed through fixed spawn keys, so a config fully
determines the model.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, asdict, replace

import numpy as np

from .metrics import stratified_split

_RATE_CLIP = 1e-6


@dataclass(frozen=True)
class GbdtConfig:
    n_rounds: int = 200
    max_depth: int = 6
    learning_rate: float = 0.2
    l2: float = 1.0
    gamma: float = 0.0
    min_child_weight: float = 1.0
    subsample: float = 1.0
    colsample: float = 1.0
    early_stopping_rounds: int = 20
    validation_fraction: float = 0.2
    seed: int = 0

    def validate(self) -> None:
        if self.n_rounds < 1:
            raise ValueError("n_rounds must be at least 1")
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")
        if not self.learning_rate > 0.0:
            raise ValueError("learning_rate must be positive")
        if self.l2 < 0.0 or self.gamma < 0.0 or self.min_child_weight < 0.0:
            raise ValueError("l2, gamma, and min_child_weight must be non-negative")
        if not 0.0 < self.subsample <= 1.0:
            raise ValueError("subsample must be in (0, 1]")
        if not 0.0 < self.colsample <= 1.0:
            raise ValueError("colsample must be in (0, 1]")
        if self.early_stopping_rounds < 0:
            raise ValueError("early_stopping_rounds must be non-negative")
        if not 0.0 <= self.validation_fraction < 1.0:
            raise ValueError("validation_fraction must be in [0, 1)")

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, obj: dict) -> "GbdtConfig":
        return cls(**obj)


def _sigmoid(margin: np.ndarray) -> np.ndarray:
    out = np.empty_like(margin)
    pos = margin >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-margin[pos]))
    e = np.exp(margin[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def _logloss(margin: np.ndarray, y: np.ndarray) -> float:
    return float(np.mean(np.logaddexp(0.0, margin) - y * margin))


def _best_split(
    Xn: np.ndarray,
    gn: np.ndarray,
    hn: np.ndarray,
    l2: float,
    gamma: float,
    min_child_weight: float,
) -> tuple[int, float, float] | None:
    """Best (column, threshold, gain) over every eligible split of the node.

    Candidate thresholds sit between consecutive distinct sorted values.
    Ties on gain resolve to the smallest split position, then the smallest
    column index, so the choice never depends on memory layout.
    """
    m = Xn.shape[0]
    if m < 2:
        return None
    order = np.argsort(Xn, axis=0, kind="stable")
    Xs = np.take_along_axis(Xn, order, axis=0)
    GL = np.cumsum(gn[order], axis=0)[:-1]
    HL = np.cumsum(hn[order], axis=0)[:-1]
    g_total = float(gn.sum())
    h_total = float(hn.sum())
    GR = g_total - GL
    HR = h_total - HL
    valid = (Xs[1:] > Xs[:-1]) & (HL >= min_child_weight) & (HR >= min_child_weight)
    if not valid.any():
        return None
    gain = 0.5 * (
        GL * GL / (HL + l2)
        + GR * GR / (HR + l2)
        - g_total * g_total / (h_total + l2)
    ) - gamma
    gain = np.where(valid, gain, -np.inf)
    flat = int(np.argmax(gain))
    pos, col = divmod(flat, gain.shape[1])
    best_gain = float(gain[pos, col])
    if best_gain < 0.0:
        return None
    lo = float(Xs[pos, col])
    hi = float(Xs[pos + 1, col])
    threshold = 0.5 * (lo + hi)
    # midpoints of adjacent floats can round onto either bound
    if not lo <= threshold < hi:
        threshold = lo
    return col, threshold, best_gain


def _grow_tree(
    X: np.ndarray,
    g: np.ndarray,
    h: np.ndarray,
    rows: np.ndarray,
    cols: np.ndarray,
    cfg: GbdtConfig,
    importance: np.ndarray,
) -> dict:
    """Grow one tree on the given row subset, restricted to cols.

    Returns flat parallel arrays; feature == -1 marks a leaf. Split gains
    are added onto the caller's importance accumulator at global feature
    indices.
    """
    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []
    Xsub = X[:, cols]

    def new_node() -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        return len(feature) - 1

    def build(node_rows: np.ndarray, depth: int) -> int:
        node = new_node()
        g_sum = float(g[node_rows].sum())
        h_sum = float(h[node_rows].sum())
        value[node] = -g_sum / (h_sum + cfg.l2)
        if depth >= cfg.max_depth or len(node_rows) < 2:
            return node
        found = _best_split(
            Xsub[node_rows],
            g[node_rows],
            h[node_rows],
            cfg.l2,
            cfg.gamma,
            cfg.min_child_weight,
        )
        if found is None:
            return node
        col_local, thr, gain = found
        col_global = int(cols[col_local])
        mask = Xsub[node_rows, col_local] <= thr
        importance[col_global] += gain
        feature[node] = col_global
        threshold[node] = thr
        left[node] = build(node_rows[mask], depth + 1)
        right[node] = build(node_rows[~mask], depth + 1)
        return node

    build(rows, 0)
    return {
        "feature": np.array(feature, dtype=np.int64),
        "threshold": np.array(threshold, dtype=np.float64),
        "left": np.array(left, dtype=np.int64),
        "right": np.array(right, dtype=np.int64),
        "value": np.array(value, dtype=np.float64),
    }


def _tree_predict(tree: dict, X: np.ndarray) -> np.ndarray:
    feature = tree["feature"]
    threshold = tree["threshold"]
    left = tree["left"]
    right = tree["right"]
    value = tree["value"]
    node = np.zeros(len(X), dtype=np.int64)
    while True:
        f = feature[node]
        active = f >= 0
        if not active.any():
            break
        idx = np.flatnonzero(active)
        go_left = X[idx, f[idx]] <= threshold[node[idx]]
        node[idx] = np.where(go_left, left[node[idx]], right[node[idx]])
    return value[node]


@dataclass
class BoostedTreesModel:
    trees: list[dict]
    base_score: float
    learning_rate: float
    n_features: int
    importance_gain: np.ndarray
    train_loss: list[float]
    val_loss: list[float]
    best_iteration: int
    stopped_early: bool
    config: GbdtConfig
    feature_names: list[str] = field(default_factory=list)

    @property
    def normalized_importance(self) -> np.ndarray:
        total = float(self.importance_gain.sum())
        if total <= 0.0:
            return np.full(self.n_features, 1.0 / self.n_features)
        return self.importance_gain / total

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ValueError("feature matrix width does not match the model")
        margin = np.full(len(X), self.base_score, dtype=np.float64)
        for tree in self.trees:
            margin += self.learning_rate * _tree_predict(tree, X)
        return margin

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return _sigmoid(self.decision_function(X))

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "kind": "gbdt",
            "base_score": float(self.base_score),
            "learning_rate": float(self.learning_rate),
            "n_features": self.n_features,
            "trees": [
                {
                    "feature": [int(v) for v in t["feature"]],
                    "threshold": [float(v) for v in t["threshold"]],
                    "left": [int(v) for v in t["left"]],
                    "right": [int(v) for v in t["right"]],
                    "value": [float(v) for v in t["value"]],
                }
                for t in self.trees
            ],
            "importance_gain": [float(v) for v in self.importance_gain],
            "train_loss": [float(v) for v in self.train_loss],
            "val_loss": [float(v) for v in self.val_loss],
            "best_iteration": self.best_iteration,
            "stopped_early": self.stopped_early,
            "config": self.config.as_dict(),
            "feature_names": list(self.feature_names),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "BoostedTreesModel":
        if obj.get("schema_version") != 1 or obj.get("kind") != "gbdt":
            raise ValueError("not a version-1 boosted-trees model record")
        trees = [
            {
                "feature": np.array(t["feature"], dtype=np.int64),
                "threshold": np.array(t["threshold"], dtype=np.float64),
                "left": np.array(t["left"], dtype=np.int64),
                "right": np.array(t["right"], dtype=np.int64),
                "value": np.array(t["value"], dtype=np.float64),
            }
            for t in obj["trees"]
        ]
        return cls(
            trees=trees,
            base_score=float(obj["base_score"]),
            learning_rate=float(obj["learning_rate"]),
            n_features=int(obj["n_features"]),
            importance_gain=np.array(obj["importance_gain"], dtype=np.float64),
            train_loss=[float(v) for v in obj["train_loss"]],
            val_loss=[float(v) for v in obj["val_loss"]],
            best_iteration=int(obj["best_iteration"]),
            stopped_early=bool(obj["stopped_early"]),
            config=GbdtConfig.from_dict(obj["config"]),
            feature_names=list(obj.get("feature_names", [])),
        )


def train_gbdt(
    X: np.ndarray,
    y: np.ndarray,
    config: GbdtConfig | None = None,
    feature_names: list[str] | None = None,
) -> BoostedTreesModel:
    """Boost trees against logistic loss with optional early stopping.

    When early_stopping_rounds > 0 and validation_fraction > 0, a seeded
    stratified slice of the input is held out; boosting stops once the
    held-out loss has not improved for that many rounds and the model is
    truncated to its best round. The recorded train-loss trace is always
    measured on the rows trees were fit to, never on the held-out slice.
    """
    cfg = config if config is not None else GbdtConfig()
    cfg.validate()
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or len(X) != len(y):
        raise ValueError("X must be 2-D with one row per label")
    if not np.all(np.isfinite(X)):
        raise ValueError("feature matrix contains non-finite values")
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("labels must be 0 or 1")
    if len(np.unique(y)) < 2:
        raise ValueError("boosting requires both classes present")
    names = list(feature_names) if feature_names is not None else []
    if names and len(names) != X.shape[1]:
        raise ValueError("feature_names length does not match X columns")

    n, d = X.shape
    use_val = cfg.early_stopping_rounds > 0 and cfg.validation_fraction > 0.0
    if use_val:
        split_seed = int(
            np.random.SeedSequence(entropy=cfg.seed, spawn_key=(11,)).generate_state(1)[0]
        )
        fit_idx, val_idx = stratified_split(y, cfg.validation_fraction, split_seed)
        if len(val_idx) == 0 or len(np.unique(y[fit_idx])) < 2:
            use_val = False
    if not use_val:
        fit_idx = np.arange(n)
        val_idx = np.array([], dtype=np.int64)

    X_fit = X[fit_idx]
    y_fit = y[fit_idx].astype(np.float64)
    X_val = X[val_idx]
    y_val = y[val_idx].astype(np.float64)
    n_fit = len(fit_idx)

    rate = float(np.clip(np.mean(y_fit), _RATE_CLIP, 1.0 - _RATE_CLIP))
    base_score = float(np.log(rate / (1.0 - rate)))
    margin_fit = np.full(n_fit, base_score, dtype=np.float64)
    margin_val = np.full(len(val_idx), base_score, dtype=np.float64)

    trees: list[dict] = []
    importance = np.zeros(d, dtype=np.float64)
    per_tree_importance: list[np.ndarray] = []
    train_loss: list[float] = []
    val_loss: list[float] = []
    best_val = float("inf")
    best_round = -1
    rounds_since_best = 0
    stopped_early = False
    warned_single_leaf = False

    n_sub = max(1, int(round(cfg.subsample * n_fit)))
    n_cols = max(1, int(round(cfg.colsample * d)))

    for t in range(cfg.n_rounds):
        p = _sigmoid(margin_fit)
        g = p - y_fit
        h = p * (1.0 - p)
        if cfg.subsample < 1.0:
            rng = np.random.default_rng(
                np.random.SeedSequence(entropy=cfg.seed, spawn_key=(1, t))
            )
            rows = np.sort(rng.choice(n_fit, size=n_sub, replace=False))
        else:
            rows = np.arange(n_fit)
        if cfg.colsample < 1.0:
            rng_c = np.random.default_rng(
                np.random.SeedSequence(entropy=cfg.seed, spawn_key=(2, t))
            )
            cols = np.sort(rng_c.choice(d, size=n_cols, replace=False))
        else:
            cols = np.arange(d)

        tree_gain = np.zeros(d, dtype=np.float64)
        tree = _grow_tree(X_fit, g, h, rows, cols, cfg, tree_gain)
        if len(tree["feature"]) == 1 and not warned_single_leaf:
            warnings.warn(
                "no eligible split at the root; boosting a single-leaf tree",
                RuntimeWarning,
                stacklevel=2,
            )
            warned_single_leaf = True
        trees.append(tree)
        per_tree_importance.append(tree_gain)
        importance += tree_gain

        margin_fit += cfg.learning_rate * _tree_predict(tree, X_fit)
        loss_t = _logloss(margin_fit, y_fit)
        if not np.isfinite(loss_t):
            raise FloatingPointError("boosting loss diverged to a non-finite value")
        train_loss.append(loss_t)

        if use_val:
            margin_val += cfg.learning_rate * _tree_predict(tree, X_val)
            v = _logloss(margin_val, y_val)
            val_loss.append(v)
            if v < best_val:
                best_val = v
                best_round = t
                rounds_since_best = 0
            else:
                rounds_since_best += 1
                if rounds_since_best >= cfg.early_stopping_rounds:
                    stopped_early = True
                    break

    if use_val and best_round >= 0:
        keep = best_round + 1
    else:
        keep = len(trees)
    if keep < len(trees):
        importance = np.sum(per_tree_importance[:keep], axis=0)
    trees = trees[:keep]

    return BoostedTreesModel(
        trees=trees,
        base_score=base_score,
        learning_rate=cfg.learning_rate,
        n_features=d,
        importance_gain=importance,
        train_loss=train_loss,
        val_loss=val_loss,
        best_iteration=keep - 1,
        stopped_early=stopped_early,
        config=cfg,
        feature_names=names,
    )
