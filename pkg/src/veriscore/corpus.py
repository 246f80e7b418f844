"""Corpus ingestion: four JSONL inputs, validation, and the ingestion report.

Input files (one JSON object per line):
  profiles.jsonl         user_id, created_at, followers_count, friends_count,
                         statuses_count, listed_count, verified
  tweets.jsonl           user_id, tweet_id, created_at, text, optional
                         hashtags/mentions/urls/is_retweet (backfilled from text)
  timeseries.jsonl       user_id, points: [{timestamp, followers, friends, statuses}]
  external_scores.jsonl  user_id, analytic, clout, authentic, tone (0..100),
                         cap, network, content, temporal (0..1)

Malformed lines are counted and skipped, never fatal. Duplicate user ids and
profiles created after the snapshot date abort ingestion.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from datetime import datetime, timezone
from pathlib import Path

from .text import (
    extract_hashtags,
    extract_mentions,
    extract_urls,
    is_retweet_text,
)

LIWC_FIELDS = ("analytic", "clout", "authentic", "tone")
SCORE_FIELDS = ("cap", "network", "content", "temporal")


class CorpusError(ValueError):
    """Unrecoverable ingestion problem (duplicates, broken references)."""


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO-8601 UTC timestamp. Naive or non-UTC values are rejected."""
    if not isinstance(value, str):
        raise ValueError(f"timestamp must be a string, got {type(value).__name__}")
    ts = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if ts.tzinfo is None or ts.utcoffset() != timezone.utc.utcoffset(None):
        raise ValueError(f"timestamp not UTC: {value!r}")
    return ts


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


@dataclass(frozen=True)
class CollectionWindow:
    start: datetime
    end: datetime
    snapshot: datetime

    def __post_init__(self):
        if not self.start < self.end:
            raise ValueError("window start must precede end")
        if self.snapshot < self.end:
            raise ValueError("snapshot date must not precede window end")

    @property
    def length_days(self) -> float:
        return (self.end - self.start).total_seconds() / 86400.0


@dataclass(frozen=True)
class UserProfile:
    user_id: str
    created_at: datetime
    followers_count: int
    friends_count: int
    statuses_count: int
    listed_count: int
    verified: bool


@dataclass(frozen=True)
class TweetRecord:
    user_id: str
    tweet_id: str
    created_at: datetime
    text: str
    hashtags: tuple[str, ...]
    mentions: tuple[str, ...]
    urls: tuple[str, ...]
    is_retweet: bool


@dataclass(frozen=True)
class StatPoint:
    timestamp: datetime
    followers: int
    friends: int
    statuses: int


@dataclass(frozen=True)
class StatTimeSeries:
    user_id: str
    points: tuple[StatPoint, ...]


@dataclass(frozen=True)
class ExternalScores:
    user_id: str
    analytic: float
    clout: float
    authentic: float
    tone: float
    cap: float
    network: float
    content: float
    temporal: float

    def as_vector(self) -> list[float]:
        return [getattr(self, f) for f in LIWC_FIELDS + SCORE_FIELDS]


@dataclass
class LineCounters:
    """Per-file ingestion accounting. retained + dropped + malformed == total."""

    total: int = 0
    retained: int = 0
    dropped: int = 0
    malformed: int = 0
    errors: list[str] = field(default_factory=list)

    def note_malformed(self, lineno: int, reason: str, cap: int = 20):
        self.malformed += 1
        if len(self.errors) < cap:
            self.errors.append(f"line {lineno}: {reason}")


@dataclass(frozen=True)
class Corpus:
    profiles: dict[str, UserProfile]
    tweets: dict[str, tuple[TweetRecord, ...]]
    series: dict[str, StatTimeSeries]
    external: dict[str, ExternalScores]
    window: CollectionWindow

    def user_ids(self) -> list[str]:
        """Canonical (sorted) user order; all downstream iteration uses this."""
        return sorted(self.profiles)

    def tweets_for(self, user_id: str) -> tuple[TweetRecord, ...]:
        return self.tweets.get(user_id, ())

    @property
    def n_users(self) -> int:
        return len(self.profiles)

    @property
    def n_tweets(self) -> int:
        return sum(len(t) for t in self.tweets.values())


def _iter_jsonl(path, counters: LineCounters):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            counters.total += 1
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                counters.note_malformed(lineno, f"bad json ({exc.msg})")
                continue
            if not isinstance(obj, dict):
                counters.note_malformed(lineno, "not an object")
                continue
            yield lineno, obj


def _require(obj: dict, key: str):
    if key not in obj:
        raise ValueError(f"missing field {key!r}")
    return obj[key]


def _as_count(value, key: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"{key} must be numeric")
    count = int(value)
    if count != value or count < 0:
        raise ValueError(f"{key} must be a non-negative integer")
    return count


def _as_user_id(value) -> str:
    if isinstance(value, str) and value:
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return str(value)
    raise ValueError("user_id must be a non-empty string or integer")


def load_profiles(path, snapshot: datetime) -> tuple[dict[str, UserProfile], LineCounters]:
    counters = LineCounters()
    profiles: dict[str, UserProfile] = {}
    for lineno, obj in _iter_jsonl(path, counters):
        try:
            user_id = _as_user_id(_require(obj, "user_id"))
            created = parse_timestamp(_require(obj, "created_at"))
            profile = UserProfile(
                user_id=user_id,
                created_at=created,
                followers_count=_as_count(_require(obj, "followers_count"), "followers_count"),
                friends_count=_as_count(_require(obj, "friends_count"), "friends_count"),
                statuses_count=_as_count(_require(obj, "statuses_count"), "statuses_count"),
                listed_count=_as_count(_require(obj, "listed_count"), "listed_count"),
                verified=bool(_require(obj, "verified")),
            )
        except ValueError as exc:
            counters.note_malformed(lineno, str(exc))
            continue
        if profile.created_at > snapshot:
            raise CorpusError(
                f"profile {profile.user_id}: created_at after snapshot date "
                f"({format_timestamp(profile.created_at)} > {format_timestamp(snapshot)})"
            )
        if profile.user_id in profiles:
            raise CorpusError(f"duplicate user_id {profile.user_id!r} in profiles")
        profiles[profile.user_id] = profile
        counters.retained += 1
    return profiles, counters


def _parse_entity_list(obj: dict, key: str, fallback) -> tuple[str, ...]:
    if key in obj:
        raw = obj[key]
        if not isinstance(raw, list) or any(not isinstance(x, str) for x in raw):
            raise ValueError(f"{key} must be a list of strings")
        return tuple(x for x in raw if x)  # no empty strings
    return tuple(fallback)


def load_tweets(path, window: CollectionWindow) -> tuple[dict[str, tuple[TweetRecord, ...]], LineCounters]:
    """Load tweets, dropping (and counting) those outside the collection window.

    Entity fields absent from a line are parsed out of the text with the
    shared grammar; is_retweet falls back to the 'RT @' prefix test.
    """
    counters = LineCounters()
    by_user: dict[str, list[TweetRecord]] = {}
    for lineno, obj in _iter_jsonl(path, counters):
        try:
            text = _require(obj, "text")
            if not isinstance(text, str):
                raise ValueError("text must be a string")
            created = parse_timestamp(_require(obj, "created_at"))
            record = TweetRecord(
                user_id=_as_user_id(_require(obj, "user_id")),
                tweet_id=_as_user_id(_require(obj, "tweet_id")),
                created_at=created,
                text=text,
                hashtags=_parse_entity_list(obj, "hashtags", extract_hashtags(text)),
                mentions=_parse_entity_list(obj, "mentions", extract_mentions(text)),
                urls=_parse_entity_list(obj, "urls", extract_urls(text)),
                is_retweet=bool(obj["is_retweet"]) if "is_retweet" in obj else is_retweet_text(text),
            )
        except ValueError as exc:
            counters.note_malformed(lineno, str(exc))
            continue
        if not (window.start <= record.created_at <= window.end):
            counters.dropped += 1
            continue
        by_user.setdefault(record.user_id, []).append(record)
        counters.retained += 1
    # canonical per-user order, so permuting input lines changes nothing
    tweets = {
        uid: tuple(sorted(recs, key=lambda r: (r.created_at, r.tweet_id)))
        for uid, recs in by_user.items()
    }
    return tweets, counters


def load_timeseries(path) -> tuple[dict[str, StatTimeSeries], LineCounters]:
    counters = LineCounters()
    series: dict[str, StatTimeSeries] = {}
    for lineno, obj in _iter_jsonl(path, counters):
        try:
            user_id = _as_user_id(_require(obj, "user_id"))
            raw_points = _require(obj, "points")
            if not isinstance(raw_points, list) or not raw_points:
                raise ValueError("points must be a non-empty list")
            points = []
            for p in raw_points:
                points.append(
                    StatPoint(
                        timestamp=parse_timestamp(_require(p, "timestamp")),
                        followers=_as_count(_require(p, "followers"), "followers"),
                        friends=_as_count(_require(p, "friends"), "friends"),
                        statuses=_as_count(_require(p, "statuses"), "statuses"),
                    )
                )
            for a, b in zip(points, points[1:]):
                if not a.timestamp < b.timestamp:
                    raise ValueError("timestamps must be strictly increasing")
                if b.statuses < a.statuses:
                    raise ValueError("statuses must be non-decreasing")
        except ValueError as exc:
            counters.note_malformed(lineno, str(exc))
            continue
        if user_id in series:
            raise CorpusError(f"duplicate user_id {user_id!r} in timeseries")
        series[user_id] = StatTimeSeries(user_id=user_id, points=tuple(points))
        counters.retained += 1
    return series, counters


def load_external(path) -> tuple[dict[str, ExternalScores], LineCounters]:
    counters = LineCounters()
    external: dict[str, ExternalScores] = {}
    for lineno, obj in _iter_jsonl(path, counters):
        try:
            user_id = _as_user_id(_require(obj, "user_id"))
            values = {}
            for key in LIWC_FIELDS:
                v = float(_require(obj, key))
                if not 0.0 <= v <= 100.0:
                    raise ValueError(f"{key} out of range [0, 100]")
                values[key] = v
            for key in SCORE_FIELDS:
                v = float(_require(obj, key))
                if not 0.0 <= v <= 1.0:
                    raise ValueError(f"{key} out of range [0, 1]")
                values[key] = v
        except (TypeError, ValueError) as exc:
            counters.note_malformed(lineno, str(exc))
            continue
        if user_id in external:
            raise CorpusError(f"duplicate user_id {user_id!r} in external scores")
        external[user_id] = ExternalScores(user_id=user_id, **values)
        counters.retained += 1
    return external, counters


def assemble_corpus(
    profiles: dict[str, UserProfile],
    tweets: dict[str, tuple[TweetRecord, ...]],
    series: dict[str, StatTimeSeries],
    external: dict[str, ExternalScores],
    window: CollectionWindow,
) -> Corpus:
    """Join the four record maps, enforcing referential integrity.

    Every tweet, series and external row must reference a profiled user.
    Users with no tweets are retained; missing series/external rows are
    handled downstream (defaults and imputation).
    """
    for name, keys in (("tweets", tweets), ("timeseries", series), ("external scores", external)):
        stray = sorted(set(keys) - set(profiles))
        if stray:
            raise CorpusError(f"{name} reference unknown user {stray[0]!r}")
    return Corpus(
        profiles=dict(profiles),
        tweets=dict(tweets),
        series=dict(series),
        external=dict(external),
        window=window,
    )


def load_corpus(
    profiles_path,
    tweets_path,
    timeseries_path,
    external_path,
    window: CollectionWindow,
) -> tuple[Corpus, dict]:
    """Load all four files and return (corpus, ingestion report)."""
    profiles, c_prof = load_profiles(profiles_path, window.snapshot)
    tweets, c_tw = load_tweets(tweets_path, window)
    series, c_ts = load_timeseries(timeseries_path)
    external, c_ext = load_external(external_path)
    corpus = assemble_corpus(profiles, tweets, series, external, window)
    report = build_ingestion_report(
        corpus,
        {"profiles": c_prof, "tweets": c_tw, "timeseries": c_ts, "external_scores": c_ext},
    )
    return corpus, report


def follower_overlap_fraction(corpus: Corpus, tolerance: float = 0.02) -> float:
    """Fraction of non-verified users whose follower count is within
    `tolerance` (relative) of at least one verified user's count.

    Reported for awareness only; no pairing or resampling is performed.
    """
    import numpy as np

    verified = np.array(
        sorted(p.followers_count for p in corpus.profiles.values() if p.verified),
        dtype=np.float64,
    )
    plain = [p.followers_count for p in corpus.profiles.values() if not p.verified]
    if verified.size == 0 or not plain:
        return 0.0
    hits = 0
    for f in plain:
        lo = np.searchsorted(verified, f / (1.0 + tolerance), side="left")
        hi = np.searchsorted(verified, f * (1.0 + tolerance), side="right")
        if hi > lo:
            hits += 1
    return hits / len(plain)


def build_ingestion_report(corpus: Corpus, counters: dict[str, LineCounters]) -> dict:
    users = corpus.user_ids()
    missing_external = [u for u in users if u not in corpus.external]
    missing_series = [u for u in users if u not in corpus.series]
    no_tweets = [u for u in users if not corpus.tweets_for(u)]
    report = {
        "files": {name: asdict(c) for name, c in counters.items()},
        "n_users": corpus.n_users,
        "n_verified": sum(1 for p in corpus.profiles.values() if p.verified),
        "n_tweets": corpus.n_tweets,
        "users_without_tweets": len(no_tweets),
        "users_missing_timeseries": len(missing_series),
        "users_missing_external": len(missing_external),
        "follower_overlap_fraction": follower_overlap_fraction(corpus),
        "window": {
            "start": format_timestamp(corpus.window.start),
            "end": format_timestamp(corpus.window.end),
            "snapshot": format_timestamp(corpus.window.snapshot),
        },
    }
    for name, c in counters.items():
        if c.retained + c.dropped + c.malformed != c.total:
            raise AssertionError(f"{name}: counter bookkeeping broken")
    return report


# ---------------------------------------------------------------- writers

def _profile_obj(p: UserProfile) -> dict:
    return {
        "user_id": p.user_id,
        "created_at": format_timestamp(p.created_at),
        "followers_count": p.followers_count,
        "friends_count": p.friends_count,
        "statuses_count": p.statuses_count,
        "listed_count": p.listed_count,
        "verified": p.verified,
    }


def _tweet_obj(t: TweetRecord) -> dict:
    return {
        "user_id": t.user_id,
        "tweet_id": t.tweet_id,
        "created_at": format_timestamp(t.created_at),
        "text": t.text,
        "hashtags": list(t.hashtags),
        "mentions": list(t.mentions),
        "urls": list(t.urls),
        "is_retweet": t.is_retweet,
    }


def _series_obj(s: StatTimeSeries) -> dict:
    return {
        "user_id": s.user_id,
        "points": [
            {
                "timestamp": format_timestamp(p.timestamp),
                "followers": p.followers,
                "friends": p.friends,
                "statuses": p.statuses,
            }
            for p in s.points
        ],
    }


def _external_obj(e: ExternalScores) -> dict:
    obj = {"user_id": e.user_id}
    for key in LIWC_FIELDS + SCORE_FIELDS:
        obj[key] = getattr(e, key)
    return obj


def _write_jsonl(path, objs):
    with open(path, "w", encoding="utf-8") as fh:
        for obj in objs:
            fh.write(json.dumps(obj, sort_keys=True))
            fh.write("\n")


def write_corpus(corpus: Corpus, out_dir) -> dict[str, str]:
    """Write the four JSONL files (canonically sorted). Returns name -> path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    users = corpus.user_ids()
    paths = {
        "profiles": out / "profiles.jsonl",
        "tweets": out / "tweets.jsonl",
        "timeseries": out / "timeseries.jsonl",
        "external_scores": out / "external_scores.jsonl",
    }
    _write_jsonl(paths["profiles"], (_profile_obj(corpus.profiles[u]) for u in users))
    _write_jsonl(
        paths["tweets"],
        (_tweet_obj(t) for u in users for t in corpus.tweets_for(u)),
    )
    _write_jsonl(
        paths["timeseries"],
        (_series_obj(corpus.series[u]) for u in users if u in corpus.series),
    )
    _write_jsonl(
        paths["external_scores"],
        (_external_obj(corpus.external[u]) for u in users if u in corpus.external),
    )
    return {k: str(v) for k, v in paths.items()}
