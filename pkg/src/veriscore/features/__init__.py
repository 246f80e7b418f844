"""Per-user feature families: metadata, content, temporal, external, topic."""

from .registry import (
    FeatureRegistry,
    FeatureMatrix,
    build_registry,
    write_features_csv,
    read_features_csv,
)
from .sentiment import SentimentLexicon, load_sentiment_lexicon, score_tweet, score_user
from .pos import POS_TAGS, PosLexicon, load_pos_lexicon, tag_word, tag_counts
from .extract import (
    metadata_features,
    content_features,
    temporal_features,
    char_entropy,
    assemble_features,
)

__all__ = [
    "FeatureRegistry",
    "FeatureMatrix",
    "build_registry",
    "SentimentLexicon",
    "load_sentiment_lexicon",
    "score_tweet",
    "score_user",
    "POS_TAGS",
    "PosLexicon",
    "load_pos_lexicon",
    "tag_word",
    "tag_counts",
    "metadata_features",
    "content_features",
    "temporal_features",
    "char_entropy",
    "assemble_features",
    "write_features_csv",
    "read_features_csv",
]
