"""veriscore: batch analysis of social-platform user data.

Feature extraction, class rebalancing, verification-likelihood classifiers,
importance/selection reports, user clustering and topic analyses, plus a
pipeline CLI. Everything is deterministic under an explicit seed.
"""

__version__ = "0.1.0"
