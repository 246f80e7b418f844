"""Feature registry: the single source of truth for feature order.

Every downstream artifact (feature CSV, model files, importance reports,
cluster profiles) refers to features by the names and order fixed here.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .pos import POS_TAGS

FAMILIES = ("metadata", "content", "temporal", "external", "topic")

# block-level mask columns in the feature CSV; metadata is never imputed
MASKABLE_FAMILIES = ("content", "temporal", "external", "topic")

METADATA_FEATURES = (
    "followers_count",
    "friends_count",
    "statuses_count",
    "listed_count",
    "account_age_days",
)

CONTENT_FEATURES = (
    tuple(f"pos_count_{t}" for t in POS_TAGS)
    + tuple(f"pos_freq_{t}" for t in POS_TAGS)
    + (
        "avg_words_per_sentence",
        "avg_words_per_tweet",
        "char_entropy_bits",
        "long_word_count",
        "long_word_fraction",
        "sentiment_pos",
        "sentiment_neg",
        "sentiment_neu",
        "sentiment_compound",
        "hashtag_count",
        "mention_count",
        "url_count",
        "retweet_count",
        "hashtags_per_tweet",
        "mentions_per_tweet",
        "urls_per_tweet",
        "retweets_per_tweet",
    )
)

TEMPORAL_FEATURES = (
    "followers_avg",
    "friends_avg",
    "statuses_avg",
    "followers_gain_30d",
    "followers_gain_90d",
    "friends_gain_30d",
    "friends_gain_90d",
    "statuses_gain_30d",
    "statuses_gain_90d",
    "status_interval_days",
)

EXTERNAL_FEATURES = (
    "ext_analytic",
    "ext_clout",
    "ext_authentic",
    "ext_tone",
    "ext_cap",
    "ext_network",
    "ext_content",
    "ext_temporal",
)


@dataclass(frozen=True)
class FeatureRegistry:
    names: tuple[str, ...]
    families: tuple[str, ...]
    defaults: tuple[float, ...]

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate feature names in registry")
        if not (len(self.names) == len(self.families) == len(self.defaults)):
            raise ValueError("registry columns must align")
        for fam in self.families:
            if fam not in FAMILIES:
                raise ValueError(f"unknown family {fam!r}")

    def __len__(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def family_indices(self, family: str) -> np.ndarray:
        return np.array([i for i, f in enumerate(self.families) if f == family], dtype=np.intp)

    def default_vector(self) -> np.ndarray:
        return np.array(self.defaults, dtype=np.float64)

    @property
    def n_topics(self) -> int:
        return int(np.sum([f == "topic" for f in self.families]))

    def to_json(self) -> str:
        rows = [
            {"name": n, "family": f, "default": d}
            for n, f, d in zip(self.names, self.families, self.defaults)
        ]
        return json.dumps({"schema_version": 1, "features": rows}, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, raw: str) -> "FeatureRegistry":
        obj = json.loads(raw)
        rows = obj["features"]
        return cls(
            names=tuple(r["name"] for r in rows),
            families=tuple(r["family"] for r in rows),
            defaults=tuple(float(r["default"]) for r in rows),
        )


def build_registry(n_topics: int = 0) -> FeatureRegistry:
    """Assemble the registry; topic entries are appended when n_topics > 0."""
    names: list[str] = []
    families: list[str] = []
    defaults: list[float] = []

    def block(feature_names, family, default_map=None):
        for n in feature_names:
            names.append(n)
            families.append(family)
            defaults.append((default_map or {}).get(n, 0.0))

    block(METADATA_FEATURES, "metadata")
    # a user with no tweets is all-neutral, so the neutral default is 1
    block(CONTENT_FEATURES, "content", {"sentiment_neu": 1.0})
    block(TEMPORAL_FEATURES, "temporal")
    block(EXTERNAL_FEATURES, "external")
    if n_topics:
        uniform = 1.0 / n_topics
        block(
            tuple(f"topic_{i:03d}" for i in range(n_topics)),
            "topic",
            {f"topic_{i:03d}": uniform for i in range(n_topics)},
        )
    return FeatureRegistry(tuple(names), tuple(families), tuple(defaults))


@dataclass
class FeatureMatrix:
    registry: FeatureRegistry
    user_ids: list[str]
    X: np.ndarray            # (n, d) float64
    mask: np.ndarray         # (n, d) bool, True where a value was imputed

    def __post_init__(self):
        n, d = self.X.shape
        if d != len(self.registry) or self.mask.shape != (n, d) or len(self.user_ids) != n:
            raise ValueError("feature matrix shapes must align with registry")

    def column(self, name: str) -> np.ndarray:
        return self.X[:, self.registry.index(name)]


def _fmt(value: float) -> str:
    # repr round-trips doubles exactly and is byte-stable
    return repr(float(value))


def write_features_csv(path, matrix: FeatureMatrix, labels: np.ndarray, split: list[str]) -> None:
    """Write user_id, label, split, features..., per-family mask columns."""
    reg = matrix.registry
    fam_cols = {
        fam: reg.family_indices(fam)
        for fam in MASKABLE_FAMILIES
        if len(reg.family_indices(fam))
    }
    header = (
        ["user_id", "label", "split"]
        + list(reg.names)
        + [f"mask_{fam}" for fam in fam_cols]
    )
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for i, uid in enumerate(matrix.user_ids):
            row = [uid, str(int(labels[i])), split[i]]
            row.extend(_fmt(v) for v in matrix.X[i])
            for fam, cols in fam_cols.items():
                row.append(str(int(bool(matrix.mask[i, cols].any()))))
            writer.writerow(row)


def read_features_csv(path, registry: FeatureRegistry):
    """Read a features CSV back. Returns (user_ids, labels, split, X, mask)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        fam_names = [h[5:] for h in header if h.startswith("mask_")]
        expected = ["user_id", "label", "split"] + list(registry.names) + [
            f"mask_{f}" for f in fam_names
        ]
        if header != expected:
            raise ValueError("features CSV header does not match registry")
        user_ids, labels, split, rows, mask_rows = [], [], [], [], []
        d = len(registry)
        fam_cols = {f: registry.family_indices(f) for f in fam_names}
        for row in reader:
            user_ids.append(row[0])
            labels.append(int(row[1]))
            split.append(row[2])
            rows.append([float(v) for v in row[3 : 3 + d]])
            m = np.zeros(d, dtype=bool)
            for j, fam in enumerate(fam_names):
                if row[3 + d + j] == "1":
                    m[fam_cols[fam]] = True
            mask_rows.append(m)
    X = np.array(rows, dtype=np.float64) if rows else np.zeros((0, d))
    mask = np.array(mask_rows, dtype=bool) if mask_rows else np.zeros((0, d), dtype=bool)
    return user_ids, np.array(labels, dtype=np.int64), split, X, mask
