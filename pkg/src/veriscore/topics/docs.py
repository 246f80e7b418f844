"""Per-user bag-of-words documents for the topic models.

Documents reuse the shared text grammar: entities (URLs, hashtags,
mentions) are stripped before tokenisation, stopwords are dropped, and
the vocabulary keeps tokens that appear in at least min_doc_freq user
documents. Token ids inside each document are stored sorted ascending,
which makes the samplers independent of tweet arrival order.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

import numpy as np

from ..corpus import Corpus
from ..text import tokenize

SHORT_DOC_TOKENS = 10


@dataclass(frozen=True)
class DocCorpus:
    user_ids: tuple[str, ...]
    vocabulary: tuple[str, ...]
    docs: list[np.ndarray]
    short_doc: np.ndarray  # bool per user: fewer than SHORT_DOC_TOKENS kept
    n_tokens: int

    @property
    def n_docs(self) -> int:
        return len(self.user_ids)

    @property
    def vocab_size(self) -> int:
        return len(self.vocabulary)


def load_stopwords() -> frozenset[str]:
    path = resources.files("veriscore.features") / "data" / "stopwords.txt"
    words = path.read_text(encoding="utf-8").split()
    return frozenset(w.lower() for w in words)


def build_user_docs(
    corpus: Corpus,
    min_doc_freq: int = 5,
    stopwords: frozenset[str] | None = None,
) -> DocCorpus:
    """One document per user, in canonical user order.

    Raises ValueError when the vocabulary comes out empty; a corpus whose
    every token falls under the document-frequency floor cannot support a
    topic model and silently returning zero-width documents would only
    defer the failure.
    """
    if min_doc_freq < 1:
        raise ValueError("min_doc_freq must be at least 1")
    stops = stopwords if stopwords is not None else load_stopwords()

    user_ids = corpus.user_ids()
    raw_tokens: list[list[str]] = []
    doc_freq: dict[str, int] = {}
    for uid in user_ids:
        words: list[str] = []
        for tweet in corpus.tweets_for(uid):
            toks, _ = tokenize(tweet.text)
            words.extend(t for t in toks if t not in stops)
        raw_tokens.append(words)
        for t in set(words):
            doc_freq[t] = doc_freq.get(t, 0) + 1

    vocabulary = tuple(sorted(t for t, df in doc_freq.items() if df >= min_doc_freq))
    if not vocabulary:
        raise ValueError(
            "vocabulary is empty after the document-frequency floor; "
            "lower min_doc_freq or supply more text"
        )
    index = {t: i for i, t in enumerate(vocabulary)}

    docs: list[np.ndarray] = []
    short = np.zeros(len(user_ids), dtype=bool)
    total = 0
    for i, words in enumerate(raw_tokens):
        ids = np.array(sorted(index[t] for t in words if t in index), dtype=np.int64)
        docs.append(ids)
        short[i] = len(ids) < SHORT_DOC_TOKENS
        total += len(ids)
    return DocCorpus(
        user_ids=tuple(user_ids),
        vocabulary=vocabulary,
        docs=docs,
        short_doc=short,
        n_tokens=total,
    )


def write_vocabulary(path, vocabulary: tuple[str, ...]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for token in vocabulary:
            fh.write(token + "\n")


def read_vocabulary(path) -> tuple[str, ...]:
    with open(path, "r", encoding="utf-8") as fh:
        return tuple(line.rstrip("\n") for line in fh if line.strip())
