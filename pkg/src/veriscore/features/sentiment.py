"""Lexicon-based tweet sentiment.

Per-word valences come from a TSV lexicon (token<TAB>valence, valences in
[-4, 4]). A one-word lookback applies modifier rules: a negation flips and
damps the following lexicon token by -0.74, an intensifier shifts its
magnitude by +/-0.293. The tweet compound score is the nonlinearly
normalized valence sum s / sqrt(s^2 + 15).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

N_SCALAR = -0.74
B_INCR = 0.293
NORM_ALPHA = 15.0

NEGATIONS = frozenset(
    """
    no not never neither nor none nothing nowhere without
    aint ain't cant can't cannot couldnt couldn't dont don't didnt didn't
    doesnt doesn't isnt isn't wasnt wasn't werent weren't wont won't
    wouldnt wouldn't shouldnt shouldn't mustnt mustn't neednt needn't
    hasnt hasn't havent haven't hadnt hadn't
    """.split()
)

# positive scalars amplify, negative scalars damp
INTENSIFIERS: dict[str, float] = {}
for _w in (
    "absolutely amazingly completely considerably decidedly deeply enormously "
    "entirely especially exceptionally extremely greatly highly hugely "
    "incredibly intensely majorly particularly purely really remarkably so "
    "substantially thoroughly totally tremendously unbelievably unusually "
    "utterly very"
).split():
    INTENSIFIERS[_w] = B_INCR
for _w in "almost barely hardly kinda less marginally occasionally partly scarcely slightly somewhat sorta".split():
    INTENSIFIERS[_w] = -B_INCR


@dataclass(frozen=True)
class SentimentLexicon:
    valence: dict[str, float]
    negations: frozenset[str] = NEGATIONS
    intensifiers: tuple = tuple(INTENSIFIERS.items())

    def intensifier_map(self) -> dict[str, float]:
        return dict(self.intensifiers)


def load_sentiment_lexicon(path=None) -> SentimentLexicon:
    """Load token<TAB>valence rows; defaults to the packaged lexicon."""
    if path is None:
        ref = resources.files("veriscore.features") / "data" / "sentiment_lexicon.tsv"
        raw = ref.read_text(encoding="utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read()
    valence: dict[str, float] = {}
    for lineno, line in enumerate(raw.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"sentiment lexicon line {lineno}: expected token<TAB>valence")
        token, value = parts[0].strip().lower(), float(parts[1])
        if not -4.0 <= value <= 4.0:
            raise ValueError(f"sentiment lexicon line {lineno}: valence out of [-4, 4]")
        valence[token] = value
    if not valence:
        raise ValueError("sentiment lexicon is empty")
    return SentimentLexicon(valence=valence)


def normalize(score: float, alpha: float = NORM_ALPHA) -> float:
    norm = score / math.sqrt(score * score + alpha)
    return max(-1.0, min(1.0, norm))


def _adjusted_valences(words: list[str], lex: SentimentLexicon) -> list[float]:
    intens = lex.intensifier_map()
    out = []
    for i, w in enumerate(words):
        v = lex.valence.get(w, 0.0)
        if v != 0.0 and i > 0:
            prev = words[i - 1]
            if prev in lex.negations:
                v *= N_SCALAR
            elif prev in intens and prev not in lex.valence:
                # boosters push away from zero, dampeners pull toward it
                v += intens[prev] if v > 0 else -intens[prev]
        out.append(v)
    return out


def score_tweet(words: list[str], lex: SentimentLexicon) -> tuple[float, float, float, float]:
    """Score one tweet's word list.

    Returns (pos, neg, neu, compound). The proportions follow the standard
    sifting convention: positive valences contribute v + 1, negatives
    |v - 1|, zero-valence words count 1 toward neutral, all normalized so
    pos + neg + neu == 1. Wordless tweets are fully neutral.
    """
    if not words:
        return 0.0, 0.0, 1.0, 0.0
    valences = _adjusted_valences(words, lex)
    pos_sum = sum(v + 1.0 for v in valences if v > 0)
    neg_sum = sum(v - 1.0 for v in valences if v < 0)
    neu_count = float(sum(1 for v in valences if v == 0))
    total = pos_sum + abs(neg_sum) + neu_count
    compound = normalize(sum(valences))
    return pos_sum / total, abs(neg_sum) / total, neu_count / total, compound


def score_user(tweet_words: list[list[str]], lex: SentimentLexicon) -> tuple[float, float, float, float]:
    """Word-count-weighted average of per-tweet scores.

    score_user = sum(len_i * score_i) / sum(len_i); users whose tweets
    carry no words at all fall back to (0, 0, 1, 0).
    """
    weighted = [0.0, 0.0, 0.0, 0.0]
    total_len = 0
    for words in tweet_words:
        n = len(words)
        if n == 0:
            continue
        scores = score_tweet(words, lex)
        for j in range(4):
            weighted[j] += n * scores[j]
        total_len += n
    if total_len == 0:
        return 0.0, 0.0, 1.0, 0.0
    return tuple(w / total_len for w in weighted)
