"""Tweet text grammar: entity extraction and tokenization.

Shared by corpus ingestion (entity backfill) and feature extraction.
"""

from __future__ import annotations

import re

# URL first: urls may contain '#', '@' or sentence punctuation.
URL_RE = re.compile(r"(?:(?<=\s)|^)(https?://\S+)")
HASHTAG_RE = re.compile(r"#(\w+)")
MENTION_RE = re.compile(r"@(\w+)")

# maximal runs of letters/digits/apostrophes, at least one alnum inside
WORD_RE = re.compile(r"[A-Za-z0-9']*[A-Za-z0-9][A-Za-z0-9']*")
SENTENCE_SPLIT_RE = re.compile(r"[.!?]+")

RETWEET_PREFIX = "RT @"


def extract_urls(text: str) -> list[str]:
    return [m.group(1) for m in URL_RE.finditer(text)]


def extract_hashtags(text: str) -> list[str]:
    """Hashtags in order of appearance, '#' stripped. URLs are masked first."""
    return [m.group(1) for m in HASHTAG_RE.finditer(URL_RE.sub(" ", text))]


def extract_mentions(text: str) -> list[str]:
    return [m.group(1) for m in MENTION_RE.finditer(URL_RE.sub(" ", text))]


def is_retweet_text(text: str) -> bool:
    return text.startswith(RETWEET_PREFIX)


def strip_entities(text: str) -> str:
    """Replace urls, hashtags and mentions with spaces."""
    out = URL_RE.sub(" ", text)
    out = HASHTAG_RE.sub(" ", out)
    out = MENTION_RE.sub(" ", out)
    return out


def tokenize(text: str) -> tuple[list[str], int]:
    """Split a tweet into lowercase words and count sentences.

    Words are maximal runs of letters, digits and apostrophes after
    entity removal; pure-apostrophe runs are not words. Sentences are
    the non-blank segments between runs of '.', '!' and '?'; non-empty
    text counts as at least one sentence.

    Returns:
        (words, n_sentences)
    """
    if not text:
        return [], 0
    stripped = strip_entities(text)
    words = [m.group(0).lower() for m in WORD_RE.finditer(stripped)]
    n_sentences = sum(
        1 for seg in SENTENCE_SPLIT_RE.split(stripped) if seg.strip()
    )
    if n_sentences == 0:
        n_sentences = 1
    return words, n_sentences


def letter_count(token: str) -> int:
    return sum(1 for ch in token if ch.isalpha())
