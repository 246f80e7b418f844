"""Heuristic part-of-speech tagging over nine coarse tags.

Closed-class words come from a TSV lexicon (token<TAB>tag); everything
else falls through suffix rules (-ly adverb, -ing/-ed verb, -ous/-ful
adjective) and defaults to noun.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

import numpy as np

POS_TAGS = (
    "noun",
    "pron_personal",
    "pron_impersonal",
    "adjective",
    "adverb",
    "verb",
    "verb_aux",
    "preposition",
    "article",
)
_TAG_INDEX = {t: i for i, t in enumerate(POS_TAGS)}


@dataclass(frozen=True)
class PosLexicon:
    tags: dict[str, str]


def load_pos_lexicon(path=None) -> PosLexicon:
    """Load token<TAB>tag rows; defaults to the packaged lexicon."""
    if path is None:
        ref = resources.files("veriscore.features") / "data" / "pos_lexicon.tsv"
        raw = ref.read_text(encoding="utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read()
    tags: dict[str, str] = {}
    for lineno, line in enumerate(raw.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"pos lexicon line {lineno}: expected token<TAB>tag")
        token, tag = parts[0].strip().lower(), parts[1].strip()
        if tag not in _TAG_INDEX:
            raise ValueError(f"pos lexicon line {lineno}: unknown tag {tag!r}")
        tags[token] = tag
    if not tags:
        raise ValueError("pos lexicon is empty")
    return PosLexicon(tags=tags)


def tag_word(word: str, lex: PosLexicon) -> str:
    tag = lex.tags.get(word)
    if tag is not None:
        return tag
    if word.endswith("ly"):
        return "adverb"
    if word.endswith("ing") or word.endswith("ed"):
        return "verb"
    if word.endswith("ous") or word.endswith("ful"):
        return "adjective"
    return "noun"


def tag_counts(words: list[str], lex: PosLexicon) -> np.ndarray:
    """Counts over POS_TAGS order, one entry per tag."""
    counts = np.zeros(len(POS_TAGS), dtype=np.float64)
    for w in words:
        counts[_TAG_INDEX[tag_word(w, lex)]] += 1.0
    return counts
