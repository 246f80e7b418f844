"""Topic modelling over per-user documents and topical-span estimation."""

from .docs import DocCorpus, build_user_docs, load_stopwords
from .lda import LdaModel, fold_in_theta, lda_gibbs, select_n_topics
from .span import SpanResult, topical_span

__all__ = [
    "DocCorpus",
    "build_user_docs",
    "load_stopwords",
    "LdaModel",
    "lda_gibbs",
    "select_n_topics",
    "fold_in_theta",
    "SpanResult",
    "topical_span",
]
