"""Synthetic corpus generator for demos and end-to-end tests.

Builds a population of platform users with planted, recoverable
structure:

* Verified accounts come in two styles: established accounts with high
  listed counts and nearly flat recent growth, and fast risers with low
  listed counts but steep 30-day follower growth. Non-verified accounts
  are mostly unremarkable on both axes, with a minority that is high on
  both (aggressive-growth accounts that also accumulated list
  placements). Verification is therefore a non-monotone function of the
  (listed, growth) pair: no linear model can separate it on those two
  coordinates, while an interaction-capable model can.

* Tweets are drawn from per-user mixtures over planted topic blocks
  with disjoint vocabularies. Verified users mix many topics,
  non-verified users few, so topic breadth echoes the label.

* Entity habits differ by class (mentions and retweets lean
  non-verified, links and hashtags lean verified), and external scores
  carry weak, overlapping class shifts.

Everything is drawn from one seeded generator, so the same seed yields
byte-identical files.
"""

from __future__ import annotations

import json
import math
import os
from datetime import datetime, timedelta, timezone

import numpy as np

from .corpus import CollectionWindow, format_timestamp

WINDOW_START = datetime(2023, 1, 1, tzinfo=timezone.utc)
WINDOW_END = datetime(2024, 1, 1, tzinfo=timezone.utc)
SNAPSHOT = datetime(2024, 1, 2, tzinfo=timezone.utc)

WORDS_PER_TOPIC = 20

POSITIVE_WORDS = ("good", "great", "love", "happy", "win", "best")
NEGATIVE_WORDS = ("bad", "terrible", "hate", "sad", "lose", "worst")
FILLER_WORDS = ("the", "a", "to", "and", "of", "in", "on", "for", "with", "is")

MODE_ELITE = 0
MODE_RISER = 1
MODE_PLAIN = 2
MODE_HUSTLER = 3


def demo_window() -> CollectionWindow:
    return CollectionWindow(start=WINDOW_START, end=WINDOW_END, snapshot=SNAPSHOT)


def _topic_word(topic: int, j: int) -> str:
    return f"t{topic}w{j}"


def _draw_mode(rng: np.random.Generator, verified: bool) -> int:
    if verified:
        return MODE_ELITE if rng.random() < 0.5 else MODE_RISER
    return MODE_HUSTLER if rng.random() < 0.2 else MODE_PLAIN


# (log-mean or range) planted per mode; the PLAIN row is the baseline
# that `separation` interpolates the others toward
MODE_PARAMS = {
    MODE_ELITE: {
        "listed_mu": math.log(800.0), "listed_sig": 0.6,
        "growth": (0.001, 0.02),
        "followers_mu": math.log(80_000.0), "followers_sig": 1.0,
        "friends_mu": math.log(700.0), "friends_sig": 0.7,
        "statuses_mu": math.log(45_000.0), "statuses_sig": 0.7,
        "age": (9.5 * 365, 15 * 365),
    },
    MODE_RISER: {
        "listed_mu": math.log(15.0), "listed_sig": 0.8,
        "growth": (0.25, 0.6),
        "followers_mu": math.log(30_000.0), "followers_sig": 0.9,
        "friends_mu": math.log(4_000.0), "friends_sig": 0.8,
        "statuses_mu": math.log(7_000.0), "statuses_sig": 0.8,
        "age": (1.5 * 365, 5 * 365),
    },
    MODE_HUSTLER: {
        "listed_mu": math.log(600.0), "listed_sig": 0.5,
        "growth": (0.3, 0.7),
        "followers_mu": math.log(40_000.0), "followers_sig": 1.0,
        "friends_mu": math.log(800.0), "friends_sig": 0.8,
        "statuses_mu": math.log(6_000.0), "statuses_sig": 0.8,
        "age": (2 * 365, 9 * 365),
    },
    MODE_PLAIN: {
        "listed_mu": math.log(8.0), "listed_sig": 0.9,
        "growth": (0.0, 0.08),
        "followers_mu": math.log(8_000.0), "followers_sig": 1.3,
        "friends_mu": math.log(3_000.0), "friends_sig": 0.9,
        "statuses_mu": math.log(40_000.0), "statuses_sig": 0.9,
        "age": (1 * 365, 14 * 365),
    },
}


def _lerp(base: float, value: float, s: float) -> float:
    return base + s * (value - base)


def _profile_numbers(rng: np.random.Generator, mode: int, separation: float) -> dict:
    """Snapshot counts, account age, and the planted 30-day growth rate.

    Only the (listed, growth) pair separates the classes cleanly, and it
    does so non-monotonically: verified is (high, low) or (low, high),
    non-verified is mostly (low, low) with a (high, high) minority. The
    remaining magnitudes are crossed over the same mode pairs or widened
    until their class-conditional distributions overlap heavily.

    separation scales every planted mode contrast toward the PLAIN
    baseline: 0 collapses the modes entirely, 1 is the calibrated
    default, >1 exaggerates the gaps.
    """
    p = MODE_PARAMS[mode]
    base = MODE_PARAMS[MODE_PLAIN]
    s = separation
    listed = rng.lognormal(_lerp(base["listed_mu"], p["listed_mu"], s), p["listed_sig"])
    growth30 = rng.uniform(
        _lerp(base["growth"][0], p["growth"][0], s),
        _lerp(base["growth"][1], p["growth"][1], s),
    )
    followers = rng.lognormal(
        _lerp(base["followers_mu"], p["followers_mu"], s), p["followers_sig"]
    )
    friends = rng.lognormal(_lerp(base["friends_mu"], p["friends_mu"], s), p["friends_sig"])
    statuses = rng.lognormal(
        _lerp(base["statuses_mu"], p["statuses_mu"], s), p["statuses_sig"]
    )
    age_days = rng.uniform(
        _lerp(base["age"][0], p["age"][0], s), _lerp(base["age"][1], p["age"][1], s)
    )
    return {
        "listed": max(0, int(round(listed))),
        "growth30": float(min(max(growth30, 0.0), 0.95)),
        "followers": max(5, int(round(followers))),
        "friends": max(5, int(round(friends))),
        "statuses": max(50, int(round(statuses))),
        "age_days": float(age_days),
    }


def _entity_probs(rng: np.random.Generator, verified: bool, separation: float) -> dict:
    """Per-user entity habits: small class shifts under wide user spread."""
    base = {"hash": 0.20, "mention": 0.28, "url": 0.16, "rt": 0.24}
    shifted = {"hash": 0.30, "mention": 0.20, "url": 0.26, "rt": 0.14}
    means = (
        {k: _lerp(base[k], shifted[k], separation) for k in base} if verified else base
    )
    conc = 7.0
    return {
        key: float(rng.beta(m * conc, (1.0 - m) * conc)) for key, m in means.items()
    }


def _series_points(rng: np.random.Generator, prof: dict, created: datetime) -> list[dict]:
    """Monthly snapshots whose tail reproduces the planted growth rate.

    Followers decay backwards from the final value at the window end:
    v(t) = v_end * (1 - g)^(days_before_end / 30), so the last-30-days
    relative gain is the planted g up to rounding noise.
    """
    g = min(prof["growth30"], 0.95)
    v_end = float(prof["followers"])
    points = []
    t = WINDOW_START
    while t <= WINDOW_END:
        if t >= created:
            back_days = (WINDOW_END - t).total_seconds() / 86400.0
            followers = v_end * (1.0 - g) ** (back_days / 30.0)
            followers *= 1.0 + rng.normal(0.0, 0.004)
            frac = (t - WINDOW_START).total_seconds() / (WINDOW_END - WINDOW_START).total_seconds()
            statuses = prof["statuses"] * (0.55 + 0.45 * frac)
            friends = prof["friends"] * (0.85 + 0.15 * frac)
            points.append(
                {
                    "timestamp": format_timestamp(t),
                    "followers": max(0, int(round(followers))),
                    "friends": max(0, int(round(friends))),
                    "statuses": max(0, int(round(statuses))),
                }
            )
        t = t + timedelta(days=28)
    # monotone statuses; round-off can produce a one-off dip
    for a, b in zip(points, points[1:]):
        if b["statuses"] < a["statuses"]:
            b["statuses"] = a["statuses"]
    return points


def _external_row(
    rng: np.random.Generator, user_id: str, verified: bool, mode: int, separation: float
) -> dict:
    shift = separation if verified else 0.0
    bursty = 1.0 if mode in (MODE_RISER, MODE_HUSTLER) else 0.0
    row = {
        "user_id": user_id,
        "analytic": float(np.clip(rng.normal(50 + 6 * shift, 18), 0, 100)),
        "clout": float(np.clip(rng.normal(45 + 12 * shift, 16), 0, 100)),
        "authentic": float(np.clip(rng.normal(48 - 5 * shift, 20), 0, 100)),
        "tone": float(np.clip(rng.normal(52 + 4 * shift, 18), 0, 100)),
        "cap": float(np.clip(rng.beta(2.0, 6.0 + 2.0 * shift), 0, 1)),
        "network": float(np.clip(rng.normal(0.5 + 0.06 * shift, 0.2), 0, 1)),
        "content": float(np.clip(rng.normal(0.5 + 0.05 * shift, 0.2), 0, 1)),
        "temporal": float(np.clip(rng.normal(0.4 + 0.25 * bursty, 0.2), 0, 1)),
    }
    return row


def _tweet_text(
    rng: np.random.Generator,
    topic: int,
    verified: bool,
    probs: dict,
    n_users: int,
) -> str:
    n_words = int(rng.integers(6, 13))
    word_ids = rng.integers(0, WORDS_PER_TOPIC, size=n_words)
    words = [_topic_word(topic, int(j)) for j in word_ids]
    for k in range(len(words)):
        r = rng.random()
        if r < 0.18:
            words[k] = FILLER_WORDS[int(rng.integers(0, len(FILLER_WORDS)))]
        elif r < 0.24:
            pool = POSITIVE_WORDS if rng.random() < (0.6 if verified else 0.48) else NEGATIVE_WORDS
            words[k] = pool[int(rng.integers(0, len(pool)))]
    text = " ".join(words)
    if rng.random() < probs["hash"]:
        text += f" #topic{topic}"
    if rng.random() < probs["mention"]:
        text += f" @u{int(rng.integers(0, n_users)):05d}"
    if rng.random() < probs["url"]:
        text += f" https://ex.am/{int(rng.integers(0, 99999)):05d}"
    if rng.random() < probs["rt"]:
        text = f"RT @u{int(rng.integers(0, n_users)):05d}: " + text
    text += "."
    return text


def generate_demo_corpus(
    out_dir: str,
    n_users: int = 2000,
    verified_fraction: float = 0.25,
    separation: float = 1.0,
    n_topics: int = 10,
    mean_tweets: float = 25.0,
    seed: int = 0,
) -> dict:
    """Write profiles/tweets/timeseries/external JSONL plus a config file.

    Returns a small summary dict (counts and paths).
    """
    if n_users < 20:
        raise ValueError("n_users must be at least 20")
    if not 0.05 <= verified_fraction <= 0.5:
        raise ValueError("verified_fraction must be in [0.05, 0.5]")
    if not 0.0 <= separation <= 2.0:
        raise ValueError("separation must be in [0, 2]")
    if n_topics < 2:
        raise ValueError("n_topics must be at least 2")
    os.makedirs(out_dir, exist_ok=True)
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(101,)))

    n_verified = int(round(n_users * verified_fraction))
    verified_idx = set(int(i) for i in rng.permutation(n_users)[:n_verified])

    profiles_path = os.path.join(out_dir, "profiles.jsonl")
    tweets_path = os.path.join(out_dir, "tweets.jsonl")
    timeseries_path = os.path.join(out_dir, "timeseries.jsonl")
    external_path = os.path.join(out_dir, "external.jsonl")

    n_tweets_total = 0
    n_series_skipped = 0
    n_external_skipped = 0
    with open(profiles_path, "w", encoding="utf-8", newline="\n") as f_prof, open(
        tweets_path, "w", encoding="utf-8", newline="\n"
    ) as f_tw, open(timeseries_path, "w", encoding="utf-8", newline="\n") as f_ts, open(
        external_path, "w", encoding="utf-8", newline="\n"
    ) as f_ext:
        for i in range(n_users):
            user_id = f"u{i:05d}"
            verified = i in verified_idx
            mode = _draw_mode(rng, verified)
            prof = _profile_numbers(rng, mode, separation)
            created = SNAPSHOT - timedelta(days=prof["age_days"])
            f_prof.write(
                json.dumps(
                    {
                        "user_id": user_id,
                        "created_at": format_timestamp(created),
                        "followers_count": prof["followers"],
                        "friends_count": prof["friends"],
                        "statuses_count": prof["statuses"],
                        "listed_count": prof["listed"],
                        "verified": verified,
                    },
                    sort_keys=True,
                )
                + "\n"
            )

            # topic mixture: verified users spread over more blocks
            if verified:
                k_topics = int(rng.integers(4, min(8, n_topics) + 1))
            else:
                k_topics = int(rng.integers(1, min(5, n_topics) + 1))
            chosen = rng.choice(n_topics, size=k_topics, replace=False)
            mixture = rng.dirichlet(np.full(k_topics, 2.0))
            probs = _entity_probs(rng, verified, separation)

            if rng.random() < 0.02:
                n_tw = int(rng.integers(1, 4))
            else:
                n_tw = max(3, int(rng.poisson(mean_tweets)))
            offsets = np.sort(rng.uniform(0.0, 1.0, size=n_tw))
            window_s = (WINDOW_END - WINDOW_START).total_seconds()
            for j in range(n_tw):
                topic = int(chosen[int(rng.choice(len(chosen), p=mixture))])
                t_created = WINDOW_START + timedelta(seconds=float(offsets[j]) * (window_s - 1))
                f_tw.write(
                    json.dumps(
                        {
                            "user_id": user_id,
                            "tweet_id": f"t{i:05d}x{j:04d}",
                            "created_at": format_timestamp(t_created),
                            "text": _tweet_text(rng, topic, verified, probs, n_users),
                        },
                        sort_keys=True,
                    )
                    + "\n"
                )
            n_tweets_total += n_tw

            if rng.random() < 0.01:
                n_series_skipped += 1
            else:
                points = _series_points(rng, prof, created)
                if points:
                    f_ts.write(
                        json.dumps({"user_id": user_id, "points": points}, sort_keys=True) + "\n"
                    )
                else:
                    n_series_skipped += 1

            if rng.random() < 0.01:
                n_external_skipped += 1
            else:
                f_ext.write(
                    json.dumps(
                        _external_row(rng, user_id, verified, mode, separation), sort_keys=True
                    )
                    + "\n"
                )

    config_path = os.path.join(out_dir, "config.toml")
    _write_demo_config(config_path, out_dir, seed)

    return {
        "n_users": n_users,
        "n_verified": n_verified,
        "n_tweets": n_tweets_total,
        "n_series_skipped": n_series_skipped,
        "n_external_skipped": n_external_skipped,
        "profiles": profiles_path,
        "tweets": tweets_path,
        "timeseries": timeseries_path,
        "external": external_path,
        "config": config_path,
    }


def _write_demo_config(config_path: str, data_dir: str, seed: int) -> None:
    """Demo-sized pipeline settings.

    The importance and selection protocols default to 100 repeats for
    reporting-grade runs; the demo trims them (and the topic sweep
    count) so the full pipeline finishes quickly. At 30 shadow
    iterations a pure-noise feature still fails the two-sided binomial
    test at alpha=0.05 (2*P(X<=9) ~ 0.043), so the statuses of planted
    and noise features are unchanged, just measured with fewer repeats.
    """
    data_dir_abs = os.path.abspath(data_dir)

    def q(path: str) -> str:
        return json.dumps(path)  # TOML basic string escaping matches JSON here

    lines = [
        "[run]",
        f"seed = {seed}",
        'output_dir = "out"',
        "",
        "[data]",
        f"profiles = {q(os.path.join(data_dir_abs, 'profiles.jsonl'))}",
        f"tweets = {q(os.path.join(data_dir_abs, 'tweets.jsonl'))}",
        f"timeseries = {q(os.path.join(data_dir_abs, 'timeseries.jsonl'))}",
        f"external = {q(os.path.join(data_dir_abs, 'external.jsonl'))}",
        f'window_start = "{format_timestamp(WINDOW_START)}"',
        f'window_end = "{format_timestamp(WINDOW_END)}"',
        f'snapshot = "{format_timestamp(SNAPSHOT)}"',
        "",
        "[topics]",
        "candidates = [2, 10, 50]",
        "n_sweeps = 150",
        "fold_in_sweeps = 30",
        "",
        "[span]",
        "n_sweeps = 60",
        "",
        "[importance]",
        "n_repeats = 40",
        "n_rounds = 40",
        "",
        "[selection]",
        "n_iter = 30",
        "n_rounds = 40",
        "",
    ]
    with open(config_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines))
