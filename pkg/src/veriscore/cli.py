"""Command line pipeline for verification-likelihood analysis.

Subcommands map one-to-one onto pipeline stages. Every stage reads its
inputs from files written by earlier stages and writes its own artifacts
into run.output_dir, so stages can be re-run individually; `all` runs
the full chain in dependency order:

    validate -> topics -> featurize -> rebalance -> train -> evaluate
    -> importance -> select -> cluster -> span -> score -> report

The train/test split is decided once, stratified by label from the run
seed, and recorded in the split column of features.csv. Stages that need
the split before featurize runs (the topic stage fits on training
documents only) recompute it from the same seed, which yields the same
partition by construction.

Every random choice descends from run.seed through fixed per-stage
spawn keys, so a repeated run with the same inputs and configuration
writes byte-identical artifacts. run_manifest.json records per-stage
wall time and artifact checksums; it is the one file excluded from that
promise.

Exit codes: 0 success; 1 data or runtime failure; 2 usage errors,
including unknown configuration keys and missing upstream artifacts.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import json
import os
import sys
import time
import warnings

import numpy as np

from .cluster import (
    characterize_clusters,
    choose_k,
    lloyd,
    pca_2d,
    select_top_features,
    zscore,
)
from .config import ConfigError, config_hash, load_config
from .corpus import CollectionWindow, Corpus, CorpusError, load_corpus, parse_timestamp
from .demo import generate_demo_corpus
from .features import (
    FeatureRegistry,
    assemble_features,
    build_registry,
    load_pos_lexicon,
    load_sentiment_lexicon,
    read_features_csv,
    write_features_csv,
)
from .learn import (
    BoostedTreesModel,
    GbdtConfig,
    LogisticModel,
    all_relevant_select,
    evaluate,
    gini_importance,
    stratified_split,
    train_gbdt,
    train_logistic,
)
from .rebalance import rebalance_dataset
from .topics import build_user_docs, fold_in_theta, load_stopwords, select_n_topics, topical_span
from .topics.docs import read_vocabulary, write_vocabulary

PROG = "veriscore"
MANIFEST = "run_manifest.json"

# fixed spawn keys so every stage draws from its own stream
STAGE_KEYS = {
    "split": 3,
    "topics": 5,
    "fold_in": 7,
    "rebalance": 11,
    "train": 13,
    "topic_model": 17,
    "importance": 19,
    "selection": 23,
    "cluster": 29,
    "span": 31,
}


class UsageError(Exception):
    """Bad invocation: wrong flags, bad config, missing upstream artifact."""


def stage_seed(run_seed: int, stage: str) -> int:
    ss = np.random.SeedSequence(entropy=run_seed, spawn_key=(997, STAGE_KEYS[stage]))
    return int(ss.generate_state(1)[0])


def _fmt(value: float) -> str:
    return repr(float(value))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def write_json(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path: str):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class RunContext:
    """Shared state for one invocation: config, lazy corpus, manifest."""

    def __init__(self, cfg: dict):
        self.cfg = cfg
        self.out_dir = cfg["run"]["output_dir"]
        os.makedirs(self.out_dir, exist_ok=True)
        self.seed = int(cfg["run"]["seed"])
        self._corpus = None
        self._report = None
        self._docs = None

    def path(self, name: str) -> str:
        return os.path.join(self.out_dir, name)

    def require(self, name: str, producer: str) -> str:
        p = self.path(name)
        if not os.path.exists(p):
            raise UsageError(f"missing artifact {name}; run `{PROG} {producer}` first")
        return p

    @property
    def window(self) -> CollectionWindow:
        data = self.cfg["data"]
        for key in ("window_start", "window_end", "snapshot"):
            if not data[key]:
                raise UsageError(f"data.{key} is required; set it in the config")
        try:
            return CollectionWindow(
                start=parse_timestamp(data["window_start"]),
                end=parse_timestamp(data["window_end"]),
                snapshot=parse_timestamp(data["snapshot"]),
            )
        except ValueError as exc:
            raise UsageError(f"bad collection window: {exc}")

    @property
    def corpus(self) -> Corpus:
        if self._corpus is None:
            data = self.cfg["data"]
            for key in ("profiles", "tweets", "timeseries", "external"):
                if not os.path.exists(data[key]):
                    raise UsageError(f"data.{key} file not found: {data[key]}")
            self._corpus, self._report = load_corpus(
                data["profiles"], data["tweets"], data["timeseries"], data["external"], self.window
            )
        return self._corpus

    @property
    def ingestion_report(self) -> dict:
        _ = self.corpus
        return self._report

    @property
    def docs(self):
        if self._docs is None:
            self._docs = build_user_docs(
                self.corpus,
                min_doc_freq=self.cfg["features"]["min_doc_freq"],
                stopwords=load_stopwords(),
            )
        return self._docs

    def labels(self) -> np.ndarray:
        users = self.corpus.user_ids()
        return np.array(
            [1 if self.corpus.profiles[u].verified else 0 for u in users], dtype=np.int64
        )

    def split_indices(self) -> tuple[np.ndarray, np.ndarray]:
        return stratified_split(
            self.labels(),
            test_fraction=self.cfg["features"]["test_fraction"],
            seed=stage_seed(self.seed, "split"),
        )

    def record_stage(self, name: str, wall_time_s: float, artifacts: list[str]) -> None:
        mpath = self.path(MANIFEST)
        manifest = read_json(mpath) if os.path.exists(mpath) else {
            "schema_version": 1,
            "stages": {},
        }
        manifest["config_hash"] = config_hash(self.cfg)
        manifest["stages"][name] = {
            "wall_time_s": round(wall_time_s, 3),
            "artifacts": {a: sha256_file(self.path(a)) for a in sorted(artifacts)},
        }
        write_json(mpath, manifest)

    # ---- artifact readers shared by several stages ----

    def load_registry(self) -> FeatureRegistry:
        path = self.require("registry.json", "featurize")
        with open(path, encoding="utf-8") as fh:
            return FeatureRegistry.from_json(fh.read())

    def load_features(self):
        registry = self.load_registry()
        path = self.require("features.csv", "featurize")
        user_ids, labels, split, X, mask = read_features_csv(path, registry)
        split_arr = np.array([s == "test" for s in split], dtype=bool)
        return registry, user_ids, labels, split_arr, X, mask

    def load_gbdt(self) -> BoostedTreesModel:
        return BoostedTreesModel.from_json(read_json(self.require("model_gbdt.json", "train")))

    def load_logistic(self) -> LogisticModel:
        return LogisticModel.from_json(read_json(self.require("model_logistic.json", "train")))


def staged(name: str, artifacts: list[str]):
    """Wrap a stage function with timing, manifest update, and a log line.

    Runtime warnings raised inside the stage (booster saturation and the
    like) are collected and reported once each as plain notes instead of
    interleaving raw warning tracebacks with the progress lines.
    """

    def deco(fn):
        def run(ctx: RunContext) -> None:
            t0 = time.perf_counter()
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                fn(ctx)
            dt = time.perf_counter() - t0
            ctx.record_stage(name, dt, artifacts)
            for msg in dict.fromkeys(str(w.message) for w in caught):
                print(f"[{PROG}] {name}: note: {msg}")
            print(f"[{PROG}] {name}: done in {dt:.2f}s -> {', '.join(artifacts)}")

        run.stage_name = name
        return run

    return deco


@staged("validate", ["ingestion_report.json"])
def stage_validate(ctx: RunContext) -> None:
    report = ctx.ingestion_report
    write_json(ctx.path("ingestion_report.json"), report)


@staged(
    "topics",
    ["vocabulary.txt", "phi.csv", "theta.csv", "topics_top_words.json", "topics_meta.json"],
)
def stage_topics(ctx: RunContext) -> None:
    cfg = ctx.cfg["topics"]
    docs = ctx.docs
    users = ctx.corpus.user_ids()
    train_idx, _ = ctx.split_indices()
    train_set = set(train_idx.tolist())

    docs_train = [docs.docs[i] for i in train_idx]
    best_t, scores, models = select_n_topics(
        docs_train,
        docs.vocab_size,
        candidates=list(cfg["candidates"]),
        n_sweeps=cfg["n_sweeps"],
        seed=stage_seed(ctx.seed, "topics"),
        alpha_mode=cfg["alpha_mode"],
        beta=cfg["beta"],
    )
    model = models[best_t]

    rest_idx = [i for i in range(len(users)) if i not in train_set]
    theta_rest = fold_in_theta(
        model,
        [docs.docs[i] for i in rest_idx],
        n_sweeps=cfg["fold_in_sweeps"],
        seed=stage_seed(ctx.seed, "fold_in"),
    )
    theta = np.empty((len(users), best_t), dtype=np.float64)
    for row, i in enumerate(train_idx):
        theta[i] = model.theta[row]
    for row, i in enumerate(rest_idx):
        theta[i] = theta_rest[row]

    write_vocabulary(ctx.path("vocabulary.txt"), docs.vocabulary)

    with open(ctx.path("phi.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["topic"] + list(docs.vocabulary))
        for t in range(best_t):
            writer.writerow([str(t)] + [_fmt(v) for v in model.phi[t]])

    with open(ctx.path("theta.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["user_id"] + [f"topic_{t:03d}" for t in range(best_t)])
        for i, uid in enumerate(users):
            writer.writerow([uid] + [_fmt(v) for v in theta[i]])

    write_json(
        ctx.path("topics_top_words.json"),
        {str(t): words for t, words in enumerate(model.top_words(docs.vocabulary, 10))},
    )
    write_json(
        ctx.path("topics_meta.json"),
        {
            "schema_version": 1,
            "candidates": list(cfg["candidates"]),
            "scores": {str(t): s for t, s in scores.items()},
            "n_topics": best_t,
            "alpha_mode": cfg["alpha_mode"],
            "alpha": model.alpha,
            "beta": cfg["beta"],
            "n_sweeps": cfg["n_sweeps"],
            "fold_in_sweeps": cfg["fold_in_sweeps"],
            "vocab_size": docs.vocab_size,
            "n_tokens": docs.n_tokens,
            "n_train_docs": len(docs_train),
            "n_short_docs": int(np.sum(docs.short_doc)),
            "mean_token_ll": model.mean_token_ll,
        },
    )


def read_theta_csv(path: str) -> dict[str, np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not header or header[0] != "user_id":
            raise ValueError("theta CSV must start with a user_id column")
        theta = {}
        for row in reader:
            theta[row[0]] = np.array([float(v) for v in row[1:]], dtype=np.float64)
    return theta


@staged("featurize", ["registry.json", "features.csv"])
def stage_featurize(ctx: RunContext) -> None:
    meta = read_json(ctx.require("topics_meta.json", "topics"))
    theta_map = read_theta_csv(ctx.require("theta.csv", "topics"))
    registry = build_registry(n_topics=int(meta["n_topics"]))

    corpus = ctx.corpus
    users = corpus.user_ids()
    labels = ctx.labels()
    train_idx, test_idx = ctx.split_indices()
    split = ["train"] * len(users)
    for i in test_idx:
        split[i] = "test"

    fm = assemble_features(
        corpus,
        registry,
        load_sentiment_lexicon(),
        load_pos_lexicon(),
        topic_theta=theta_map,
        impute_user_ids=[users[i] for i in train_idx],
    )
    with open(ctx.path("registry.json"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(registry.to_json())
        fh.write("\n")
    write_features_csv(ctx.path("features.csv"), fm, labels, split)


@staged("rebalance", ["resampled.csv"])
def stage_rebalance(ctx: RunContext) -> None:
    cfg = ctx.cfg["rebalance"]
    registry, _, labels, is_test, X, _ = ctx.load_features()
    train = ~is_test
    ds = rebalance_dataset(
        X[train],
        labels[train],
        method=cfg["method"],
        k=cfg["k"],
        beta=cfg["beta"],
        seed=stage_seed(ctx.seed, "rebalance"),
    )
    with open(ctx.path("resampled.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["provenance", "label"] + list(registry.names))
        for i in range(ds.X.shape[0]):
            writer.writerow(
                [str(ds.provenance[i]), str(int(ds.y[i]))] + [_fmt(v) for v in ds.X[i]]
            )


def read_resampled_csv(path: str, registry: FeatureRegistry):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["provenance", "label"] + list(registry.names):
            raise ValueError("resampled CSV header does not match registry")
        prov, labels, rows = [], [], []
        for row in reader:
            prov.append(row[0])
            labels.append(int(row[1]))
            rows.append([float(v) for v in row[2:]])
    X = np.array(rows, dtype=np.float64)
    return np.array(prov), np.array(labels, dtype=np.int64), X


def gbdt_config_from(train_cfg: dict, seed: int) -> GbdtConfig:
    fields = {f.name for f in dataclasses.fields(GbdtConfig)}
    kwargs = {k: v for k, v in train_cfg.items() if k in fields}
    return GbdtConfig(seed=seed, **kwargs)


@staged("train", ["model_gbdt.json", "model_logistic.json"])
def stage_train(ctx: RunContext) -> None:
    cfg = ctx.cfg["train"]
    registry = ctx.load_registry()
    _, y, X = read_resampled_csv(ctx.require("resampled.csv", "rebalance"), registry)

    gb = train_gbdt(
        X,
        y,
        gbdt_config_from(cfg, seed=stage_seed(ctx.seed, "train")),
        feature_names=list(registry.names),
    )
    lr = train_logistic(
        X,
        y,
        l2=cfg["logistic_l2"],
        learning_rate=cfg["logistic_learning_rate"],
        max_epochs=cfg["logistic_max_epochs"],
        feature_names=list(registry.names),
    )
    write_json(ctx.path("model_gbdt.json"), gb.to_json())
    write_json(ctx.path("model_logistic.json"), lr.to_json())


@staged("evaluate", ["metrics.json", "metrics_topics.json"])
def stage_evaluate(ctx: RunContext) -> None:
    registry, _, labels, is_test, X, _ = ctx.load_features()
    gb = ctx.load_gbdt()
    lr = ctx.load_logistic()

    y_test = labels[is_test]
    X_test = X[is_test]
    write_json(
        ctx.path("metrics.json"),
        {
            "schema_version": 1,
            "n_train": int((~is_test).sum()),
            "n_test": int(is_test.sum()),
            "gbdt": evaluate(y_test, gb.predict_proba(X_test)),
            "logistic": evaluate(y_test, lr.predict_proba(X_test)),
        },
    )

    # how far topic mixtures alone go, trained on the same resampled set
    topic_idx = registry.family_indices("topic")
    if len(topic_idx) == 0:
        raise RuntimeError("registry has no topic features; rerun featurize after topics")
    _, y_res, X_res = read_resampled_csv(ctx.require("resampled.csv", "rebalance"), registry)
    ev = ctx.cfg["evaluate"]
    topic_cfg = dataclasses.replace(
        gbdt_config_from(ctx.cfg["train"], seed=stage_seed(ctx.seed, "topic_model")),
        max_depth=ev["topic_model_depth"],
        learning_rate=ev["topic_model_learning_rate"],
    )
    topic_model = train_gbdt(
        X_res[:, topic_idx],
        y_res,
        topic_cfg,
        feature_names=[registry.names[i] for i in topic_idx],
    )
    write_json(
        ctx.path("metrics_topics.json"),
        {
            "schema_version": 1,
            "n_topic_features": len(topic_idx),
            "gbdt_topics_only": evaluate(y_test, topic_model.predict_proba(X_test[:, topic_idx])),
        },
    )


@staged("importance", ["importance.csv"])
def stage_importance(ctx: RunContext) -> None:
    cfg = ctx.cfg["importance"]
    registry, _, labels, is_test, X, _ = ctx.load_features()
    train = ~is_test
    base = GbdtConfig(
        n_rounds=cfg["n_rounds"], max_depth=cfg["max_depth"], early_stopping_rounds=0
    )
    summaries = gini_importance(
        X[train],
        labels[train],
        base_config=base,
        n_repeats=cfg["n_repeats"],
        seed=stage_seed(ctx.seed, "importance"),
        feature_names=list(registry.names),
    )
    order = sorted(summaries, key=lambda s: (s.mean_rank, -s.mean_importance, s.feature))
    with open(ctx.path("importance.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["feature", "mean_importance", "mean_rank", "times_top"])
        for s in order:
            writer.writerow([s.feature, _fmt(s.mean_importance), _fmt(s.mean_rank), str(s.times_top)])


@staged("select", ["selection.csv"])
def stage_select(ctx: RunContext) -> None:
    cfg = ctx.cfg["selection"]
    registry, _, labels, is_test, X, _ = ctx.load_features()
    train = ~is_test
    base = GbdtConfig(
        n_rounds=cfg["n_rounds"], max_depth=cfg["max_depth"], early_stopping_rounds=0
    )
    results = all_relevant_select(
        X[train],
        labels[train],
        base_config=base,
        n_iter=cfg["n_iter"],
        alpha=cfg["alpha"],
        seed=stage_seed(ctx.seed, "selection"),
        feature_names=list(registry.names),
    )
    with open(ctx.path("selection.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["feature", "hits", "n_iter", "p_value", "status"])
        for r in results:
            writer.writerow([r.feature, str(r.hits), str(r.n_iter), _fmt(r.p_value), r.status])


def read_importance_csv(path: str) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["feature", "mean_importance", "mean_rank", "times_top"]:
            raise ValueError("importance CSV header is not recognized")
        return [
            {
                "feature": row[0],
                "mean_importance": float(row[1]),
                "mean_rank": float(row[2]),
                "times_top": int(row[3]),
            }
            for row in reader
        ]


@staged(
    "cluster",
    ["clusters.csv", "cluster_profiles.json", "pca2d.csv", "cluster_meta.json"],
)
def stage_cluster(ctx: RunContext) -> None:
    cfg = ctx.cfg["cluster"]
    registry, user_ids, labels, is_test, X, _ = ctx.load_features()
    rows = read_importance_csv(ctx.require("importance.csv", "importance"))
    gb = ctx.load_gbdt()

    rank_by_name = {r["feature"]: r["mean_rank"] for r in rows}
    mean_ranks = np.array([rank_by_name[n] for n in registry.names])
    top_idx = select_top_features(mean_ranks, top_n=min(cfg["top_features"], len(registry)))
    top_names = [registry.names[i] for i in top_idx]

    Z, _, _ = zscore(X[:, top_idx], unit_norm=cfg["unit_norm"])
    ks = list(range(cfg["k_min"], cfg["k_max"] + 1))
    seed = stage_seed(ctx.seed, "cluster")
    report = choose_k(Z, ks, seed=seed, n_seeds=cfg["n_seeds"])

    # refit the winning k with the same per-seed streams choose_k used
    best = None
    for s in range(cfg["n_seeds"]):
        child = int(
            np.random.SeedSequence(entropy=seed, spawn_key=(report.chosen_k, s)).generate_state(1)[0]
        )
        result = lloyd(Z, report.chosen_k, seed=child)
        if best is None or result.inertia < best.inertia:
            best = result

    proba = gb.predict_proba(X)
    profiles = characterize_clusters(
        X[:, top_idx], top_names, labels, proba, best.assignment, is_test
    )
    coords, ratios = pca_2d(Z)

    with open(ctx.path("clusters.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["user_id", "cluster"])
        for uid, c in zip(user_ids, best.assignment):
            writer.writerow([uid, str(int(c))])

    with open(ctx.path("pca2d.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["user_id", "pc1", "pc2", "cluster"])
        for i, uid in enumerate(user_ids):
            writer.writerow(
                [uid, _fmt(coords[i, 0]), _fmt(coords[i, 1]), str(int(best.assignment[i]))]
            )

    write_json(ctx.path("cluster_profiles.json"), {"schema_version": 1, "clusters": profiles})
    write_json(
        ctx.path("cluster_meta.json"),
        {
            "schema_version": 1,
            "features_used": top_names,
            "unit_norm": cfg["unit_norm"],
            "k_values": list(report.k_values),
            "inertias": list(report.inertias),
            "second_differences": list(report.second_differences),
            "chosen_k": report.chosen_k,
            "no_clear_knee": report.no_clear_knee,
            "variance_explained": report.variance_explained,
            "final_inertia": best.inertia,
            "final_converged": best.converged,
            "pca_variance_ratios": list(ratios),
        },
    )


@staged("span", ["span.csv"])
def stage_span(ctx: RunContext) -> None:
    cfg = ctx.cfg["span"]
    docs = ctx.docs
    base = stage_seed(ctx.seed, "span")
    with open(ctx.path("span.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["user_id", "span", "low_confidence", "n_tokens"])
        for i, uid in enumerate(docs.user_ids):
            user_seed = int(
                np.random.SeedSequence(entropy=base, spawn_key=(i,)).generate_state(1)[0]
            )
            res = topical_span(
                docs.docs[i],
                docs.vocab_size,
                gamma=cfg["gamma"],
                beta=cfg["beta"],
                n_sweeps=cfg["n_sweeps"],
                seed=user_seed,
            )
            writer.writerow(
                [uid, str(res.span), str(int(res.low_confidence)), str(res.n_tokens)]
            )


@staged("score", ["scores.csv"])
def stage_score(ctx: RunContext) -> None:
    _, user_ids, _, is_test, X, _ = ctx.load_features()
    gb = ctx.load_gbdt()
    lr = ctx.load_logistic()
    p_gb = gb.predict_proba(X)
    p_lr = lr.predict_proba(X)
    with open(ctx.path("scores.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["user_id", "score_gbdt", "score_logistic", "split"])
        for i, uid in enumerate(user_ids):
            writer.writerow(
                [uid, _fmt(p_gb[i]), _fmt(p_lr[i]), "test" if is_test[i] else "train"]
            )


@staged("report", ["report.json"])
def stage_report(ctx: RunContext) -> None:
    metrics = read_json(ctx.require("metrics.json", "evaluate"))
    metrics_topics = read_json(ctx.require("metrics_topics.json", "evaluate"))
    profiles = read_json(ctx.require("cluster_profiles.json", "cluster"))
    write_json(
        ctx.path("report.json"),
        {
            "schema_version": 1,
            "classification_metrics": metrics,
            "topic_classification_metrics": metrics_topics,
            "cluster_profiles": profiles,
        },
    )


PIPELINE = [
    stage_validate,
    stage_topics,
    stage_featurize,
    stage_rebalance,
    stage_train,
    stage_evaluate,
    stage_importance,
    stage_select,
    stage_cluster,
    stage_span,
    stage_score,
    stage_report,
]

STAGES = {fn.stage_name: fn for fn in PIPELINE}


def stage_all(ctx: RunContext) -> None:
    t0 = time.perf_counter()
    for fn in PIPELINE:
        fn(ctx)
    print(f"[{PROG}] all: {len(PIPELINE)} stages in {time.perf_counter() - t0:.2f}s")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG,
        description="Batch analysis of platform users: verification-likelihood "
        "models plus importance, selection, cluster, topic, and span analyses.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate-demo", help="write a synthetic corpus and config")
    gen.add_argument("--out", required=True, help="directory for the JSONL files and config")
    gen.add_argument("--n-users", type=int, default=2000)
    gen.add_argument("--verified-fraction", type=float, default=0.25)
    gen.add_argument(
        "--separation",
        type=float,
        default=1.0,
        help="class separation strength: 0 collapses the planted shifts, 1 is calibrated",
    )
    gen.add_argument("--n-topics", type=int, default=10)
    gen.add_argument("--mean-tweets", type=float, default=25.0)
    gen.add_argument("--seed", type=int, default=0)

    for name in list(STAGES) + ["all"]:
        p = sub.add_parser(name, help=f"run the {name} stage" if name != "all" else "run every stage in order")
        p.add_argument("--config", help="TOML config file")
        p.add_argument("--seed", type=int, help="run seed (required here or in the config)")
        p.add_argument("--output-dir", help="artifact directory (default from config)")
        p.add_argument(
            "--set",
            dest="overrides",
            action="append",
            metavar="SECTION.KEY=VALUE",
            help="override one config value; repeatable",
        )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "generate-demo":
        try:
            info = generate_demo_corpus(
                args.out,
                n_users=args.n_users,
                verified_fraction=args.verified_fraction,
                separation=args.separation,
                n_topics=args.n_topics,
                mean_tweets=args.mean_tweets,
                seed=args.seed,
            )
        except ValueError as exc:
            print(f"{PROG}: error: {exc}", file=sys.stderr)
            return 2
        print(
            f"[{PROG}] wrote {info['n_users']} users ({info['n_verified']} verified), "
            f"{info['n_tweets']} tweets to {args.out}"
        )
        print(f"[{PROG}] config: {info['config']}")
        return 0

    try:
        cfg = load_config(
            config_path=args.config,
            overrides=args.overrides,
            seed=args.seed,
            output_dir=args.output_dir,
        )
        ctx = RunContext(cfg)
        if args.command == "all":
            stage_all(ctx)
        else:
            STAGES[args.command](ctx)
    except (ConfigError, UsageError) as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 2
    except (CorpusError, OSError, ValueError, RuntimeError, FloatingPointError) as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
