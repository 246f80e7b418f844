"""Feature extractors and per-user assembly.

Extraction is label-blind: nothing in this module reads the verified flag.
Labels are joined onto the CSV by the caller.
"""

from __future__ import annotations

import math
from collections import Counter
from datetime import timedelta

import numpy as np

from ..corpus import CollectionWindow, Corpus, StatTimeSeries, TweetRecord, UserProfile
from ..text import letter_count, tokenize
from .pos import PosLexicon, tag_counts
from .registry import CONTENT_FEATURES, FeatureMatrix, FeatureRegistry, TEMPORAL_FEATURES
from .sentiment import SentimentLexicon, score_tweet

LONG_WORD_LETTERS = 6  # strictly more than this many letters


def metadata_features(profile: UserProfile, window: CollectionWindow) -> np.ndarray:
    age_days = math.floor((window.snapshot - profile.created_at).total_seconds() / 86400.0)
    return np.array(
        [
            profile.followers_count,
            profile.friends_count,
            profile.statuses_count,
            profile.listed_count,
            age_days,
        ],
        dtype=np.float64,
    )


def char_entropy(texts: list[str]) -> float:
    """Shannon entropy in bits of the character distribution of the
    concatenated texts. Empty concatenation scores 0."""
    joined = "".join(texts)
    if not joined:
        return 0.0
    counts = np.array(list(Counter(joined).values()), dtype=np.float64)
    p = counts / counts.sum()
    return float(-np.sum(p * np.log2(p)))


def content_features(
    tweets: tuple[TweetRecord, ...],
    sent_lex: SentimentLexicon,
    pos_lex: PosLexicon,
) -> np.ndarray:
    """Aggregate text features over a user's tweets (CONTENT_FEATURES order)."""
    n_tweets = len(tweets)
    if n_tweets == 0:
        raise ValueError("content_features requires at least one tweet")

    pos_counts = np.zeros(9, dtype=np.float64)
    total_words = 0
    total_sentences = 0
    long_words = 0
    n_hashtags = n_mentions = n_urls = n_retweets = 0
    weighted = np.zeros(4, dtype=np.float64)  # pos, neg, neu, compound
    weight = 0

    for t in tweets:
        words, n_sent = tokenize(t.text)
        pos_counts += tag_counts(words, pos_lex)
        total_words += len(words)
        total_sentences += n_sent
        long_words += sum(1 for w in words if letter_count(w) > LONG_WORD_LETTERS)
        n_hashtags += len(t.hashtags)
        n_mentions += len(t.mentions)
        n_urls += len(t.urls)
        n_retweets += int(t.is_retweet)
        if words:
            scores = score_tweet(words, sent_lex)
            weighted += len(words) * np.array(scores)
            weight += len(words)

    sentiment = weighted / weight if weight else np.array([0.0, 0.0, 1.0, 0.0])
    pos_freq = pos_counts / total_words if total_words else np.zeros(9)
    values = np.concatenate(
        [
            pos_counts,
            pos_freq,
            [
                total_words / total_sentences if total_sentences else 0.0,
                total_words / n_tweets,
                char_entropy([t.text for t in tweets]),
                float(long_words),
                long_words / total_words if total_words else 0.0,
            ],
            sentiment,
            [
                float(n_hashtags),
                float(n_mentions),
                float(n_urls),
                float(n_retweets),
                n_hashtags / n_tweets,
                n_mentions / n_tweets,
                n_urls / n_tweets,
                n_retweets / n_tweets,
            ],
        ]
    )
    assert values.shape == (len(CONTENT_FEATURES),)
    return values


# ------------------------------------------------------------- temporal

def _series_arrays(series: StatTimeSeries):
    ts = np.array([p.timestamp.timestamp() for p in series.points], dtype=np.float64)
    cols = {
        "followers": np.array([p.followers for p in series.points], dtype=np.float64),
        "friends": np.array([p.friends for p in series.points], dtype=np.float64),
        "statuses": np.array([p.statuses for p in series.points], dtype=np.float64),
    }
    return ts, cols


def locf_value(ts: np.ndarray, vs: np.ndarray, t: float) -> float:
    """Last observation carried forward; backfilled before the first point."""
    idx = int(np.searchsorted(ts, t, side="right")) - 1
    return float(vs[max(idx, 0)])


def locf_average(ts: np.ndarray, vs: np.ndarray, t0: float, t1: float) -> float:
    """Time-weighted mean of the LOCF step function over [t0, t1]."""
    if not t0 < t1:
        raise ValueError("empty averaging window")
    inside = ts[(ts > t0) & (ts < t1)]
    knots = np.concatenate([[t0], inside, [t1]])
    total = 0.0
    for a, b in zip(knots[:-1], knots[1:]):
        total += locf_value(ts, vs, a) * (b - a)
    return total / (t1 - t0)


def gain_fraction(ts: np.ndarray, vs: np.ndarray, t_end: float, delta_days: float) -> float:
    """Proportion of the end value gained over the trailing delta_days,
    (v(end) - v(end - delta)) / max(v(end), 1), clamped to [0, 1]."""
    v_end = locf_value(ts, vs, t_end)
    v_past = locf_value(ts, vs, t_end - delta_days * 86400.0)
    frac = (v_end - v_past) / max(v_end, 1.0)
    return float(min(1.0, max(0.0, frac)))


def temporal_features(series: StatTimeSeries, window: CollectionWindow) -> np.ndarray:
    """LOCF-based window statistics (TEMPORAL_FEATURES order)."""
    ts, cols = _series_arrays(series)
    t0, t1 = window.start.timestamp(), window.end.timestamp()
    values = []
    for key in ("followers", "friends", "statuses"):
        values.append(locf_average(ts, cols[key], t0, t1))
    for key in ("followers", "friends", "statuses"):
        values.append(gain_fraction(ts, cols[key], t1, 30.0))
        values.append(gain_fraction(ts, cols[key], t1, 90.0))
    statuses_in_window = locf_value(ts, cols["statuses"], t1) - locf_value(
        ts, cols["statuses"], t0
    )
    values.append(window.length_days / max(statuses_in_window, 1.0))
    out = np.array(values, dtype=np.float64)
    assert out.shape == (len(TEMPORAL_FEATURES),)
    return out


# ------------------------------------------------------------- assembly

def assemble_features(
    corpus: Corpus,
    registry: FeatureRegistry,
    sent_lex: SentimentLexicon,
    pos_lex: PosLexicon,
    topic_theta: dict[str, np.ndarray] | None = None,
    impute_user_ids: list[str] | None = None,
) -> FeatureMatrix:
    """Build the (n_users, d) matrix in registry order.

    Users with no tweets / no series / no external row take registry
    defaults for the family, with the family's mask bits set. External
    scores are imputed with per-field medians computed over
    impute_user_ids only (the training partition); defaults to all users.

    Args:
        topic_theta: user_id -> length-T distribution; required when the
            registry carries topic entries. Users absent from the map get
            the uniform default and a mask bit.
    """
    n_topics = registry.n_topics
    if n_topics and topic_theta is None:
        raise ValueError("registry has topic entries but no topic_theta given")

    users = corpus.user_ids()
    impute_set = set(impute_user_ids if impute_user_ids is not None else users)
    defaults = registry.default_vector()

    idx = {fam: registry.family_indices(fam) for fam in ("metadata", "content", "temporal", "external", "topic")}

    ext_rows = [
        corpus.external[u].as_vector() for u in users if u in corpus.external and u in impute_set
    ]
    if ext_rows:
        ext_fill = np.median(np.array(ext_rows, dtype=np.float64), axis=0)
    else:
        ext_fill = defaults[idx["external"]]

    n, d = len(users), len(registry)
    X = np.tile(defaults, (n, 1))
    mask = np.zeros((n, d), dtype=bool)

    for i, uid in enumerate(users):
        X[i, idx["metadata"]] = metadata_features(corpus.profiles[uid], corpus.window)

        tweets = corpus.tweets_for(uid)
        if tweets:
            X[i, idx["content"]] = content_features(tweets, sent_lex, pos_lex)
        else:
            mask[i, idx["content"]] = True

        series = corpus.series.get(uid)
        if series is not None and series.points:
            X[i, idx["temporal"]] = temporal_features(series, corpus.window)
        else:
            mask[i, idx["temporal"]] = True

        ext = corpus.external.get(uid)
        if ext is not None:
            X[i, idx["external"]] = ext.as_vector()
        else:
            X[i, idx["external"]] = ext_fill
            mask[i, idx["external"]] = True

        if n_topics:
            theta = topic_theta.get(uid)
            if theta is None:
                mask[i, idx["topic"]] = True  # uniform default already in place
            else:
                theta = np.asarray(theta, dtype=np.float64)
                if theta.shape != (n_topics,):
                    raise ValueError(f"topic vector for {uid} has wrong length")
                X[i, idx["topic"]] = theta

    if not np.all(np.isfinite(X)):
        raise ValueError("non-finite feature values after assembly")
    return FeatureMatrix(registry=registry, user_ids=list(users), X=X, mask=mask)
