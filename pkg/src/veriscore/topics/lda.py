"""Latent topic mixtures by collapsed Gibbs sampling.

The sampler keeps the three count tables (document-topic, topic-word,
topic totals) and resamples every token's topic from the collapsed
conditional

    p(z_i = t | rest) propto (n_dt + alpha) * (n_tw + beta) / (n_t + V*beta)

with the token's own count removed. All randomness is pre-drawn as
uniform arrays by a seeded generator outside the compiled kernel, so a
seed fully determines the trajectory regardless of how the kernel is
compiled.

Point estimates of phi and theta are averaged over the final quarter of
the sweeps rather than taken from the last state, which smooths out the
single-sample noise. The joint collapsed log p(w, z) is evaluated every
tenth sweep for a convergence trace, and at every recorded sweep to
score the model; the per-token average of those recorded values is the
model-selection score.

alpha follows one of two conventions (see select_n_topics): the shipped
default "inverse" sets alpha = 50 / T, so more topics mean a sparser
document prior; "as_printed" sets alpha = T / 50, the transcription some
write-ups carry. The default is the widely used heuristic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.special import gammaln

LL_EVERY = 10


def resolve_alpha(alpha_mode: str, n_topics: int) -> float:
    if alpha_mode == "inverse":
        return 50.0 / n_topics
    if alpha_mode == "as_printed":
        return n_topics / 50.0
    raise ValueError("alpha_mode must be 'inverse' or 'as_printed'")


@njit(cache=True)
def _lda_sweep(tokens, doc_of, z, n_dt, n_tw, n_t, alpha, beta, u):
    T = n_t.shape[0]
    V = n_tw.shape[1]
    for i in range(tokens.shape[0]):
        w = tokens[i]
        d = doc_of[i]
        told = z[i]
        n_dt[d, told] -= 1
        n_tw[told, w] -= 1
        n_t[told] -= 1
        total = 0.0
        for t in range(T):
            total += (n_dt[d, t] + alpha) * (n_tw[t, w] + beta) / (n_t[t] + V * beta)
        r = u[i] * total
        acc = 0.0
        tnew = T - 1
        for t in range(T):
            acc += (n_dt[d, t] + alpha) * (n_tw[t, w] + beta) / (n_t[t] + V * beta)
            if r < acc:
                tnew = t
                break
        z[i] = tnew
        n_dt[d, tnew] += 1
        n_tw[tnew, w] += 1
        n_t[tnew] += 1


@njit(cache=True)
def _fold_in_sweep(tokens, doc_of, z, n_dt, phi, alpha, u):
    T = phi.shape[0]
    for i in range(tokens.shape[0]):
        w = tokens[i]
        d = doc_of[i]
        told = z[i]
        n_dt[d, told] -= 1
        total = 0.0
        for t in range(T):
            total += (n_dt[d, t] + alpha) * phi[t, w]
        r = u[i] * total
        acc = 0.0
        tnew = T - 1
        for t in range(T):
            acc += (n_dt[d, t] + alpha) * phi[t, w]
            if r < acc:
                tnew = t
                break
        z[i] = tnew
        n_dt[d, tnew] += 1


def verify_counts(
    n_dt: np.ndarray,
    n_tw: np.ndarray,
    n_t: np.ndarray,
    doc_lengths: np.ndarray,
    n_tokens: int,
) -> None:
    """Raise when the three count tables disagree with the documents."""
    if not np.array_equal(n_dt.sum(axis=1), doc_lengths):
        raise RuntimeError("document-topic counts do not sum to document lengths")
    if not np.array_equal(n_tw.sum(axis=1), n_t):
        raise RuntimeError("topic-word counts do not sum to topic totals")
    if int(n_t.sum()) != n_tokens:
        raise RuntimeError("topic totals do not sum to the token count")
    if n_dt.min() < 0 or n_tw.min() < 0:
        raise RuntimeError("negative count encountered")


def _joint_log_likelihood(
    n_dt: np.ndarray,
    n_tw: np.ndarray,
    n_t: np.ndarray,
    doc_lengths: np.ndarray,
    alpha: float,
    beta: float,
) -> float:
    D, T = n_dt.shape
    V = n_tw.shape[1]
    doc_part = (
        D * gammaln(T * alpha)
        - float(gammaln(doc_lengths + T * alpha).sum())
        + float(gammaln(n_dt + alpha).sum())
        - D * T * gammaln(alpha)
    )
    topic_part = (
        T * gammaln(V * beta)
        - float(gammaln(n_t + V * beta).sum())
        + float(gammaln(n_tw + beta).sum())
        - T * V * gammaln(beta)
    )
    return float(doc_part + topic_part)


@dataclass
class LdaModel:
    n_topics: int
    vocab_size: int
    alpha: float
    beta: float
    alpha_mode: str
    phi: np.ndarray
    theta: np.ndarray
    ll_trace: tuple[tuple[int, float], ...]
    mean_token_ll: float
    n_sweeps: int
    seed: int
    n_tokens: int

    def top_words(self, vocabulary: tuple[str, ...], n: int = 10) -> list[list[str]]:
        out = []
        for t in range(self.n_topics):
            order = np.lexsort((np.arange(self.vocab_size), -self.phi[t]))
            out.append([vocabulary[i] for i in order[:n]])
        return out


def lda_gibbs(
    docs: list[np.ndarray],
    vocab_size: int,
    n_topics: int,
    n_sweeps: int = 200,
    seed: int = 0,
    alpha_mode: str = "inverse",
    beta: float = 0.01,
    check_counts: bool = True,
) -> LdaModel:
    if n_topics < 1:
        raise ValueError("n_topics must be at least 1")
    if n_sweeps < 4:
        raise ValueError("n_sweeps must be at least 4 to average a final quarter")
    alpha = resolve_alpha(alpha_mode, n_topics)

    doc_lengths = np.array([len(d) for d in docs], dtype=np.int64)
    n_tokens = int(doc_lengths.sum())
    if n_tokens == 0:
        raise ValueError("no tokens to sample; every document is empty")
    tokens = np.concatenate([d for d in docs if len(d)]).astype(np.int64)
    if tokens.min() < 0 or tokens.max() >= vocab_size:
        raise ValueError("token id outside the vocabulary")
    doc_of = np.repeat(np.arange(len(docs), dtype=np.int64), doc_lengths)

    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed))
    z = rng.integers(0, n_topics, size=n_tokens, dtype=np.int64)
    n_dt = np.zeros((len(docs), n_topics), dtype=np.int64)
    n_tw = np.zeros((n_topics, vocab_size), dtype=np.int64)
    np.add.at(n_dt, (doc_of, z), 1)
    np.add.at(n_tw, (z, tokens), 1)
    n_t = n_tw.sum(axis=1)

    record_from = n_sweeps - max(1, n_sweeps // 4)
    phi_acc = np.zeros((n_topics, vocab_size), dtype=np.float64)
    theta_acc = np.zeros((len(docs), n_topics), dtype=np.float64)
    n_recorded = 0
    ll_trace: list[tuple[int, float]] = []
    token_ll: list[float] = []

    for sweep in range(n_sweeps):
        u = rng.random(n_tokens)
        _lda_sweep(tokens, doc_of, z, n_dt, n_tw, n_t, alpha, beta, u)
        if check_counts:
            verify_counts(n_dt, n_tw, n_t, doc_lengths, n_tokens)
        recorded = sweep >= record_from
        if recorded or (sweep + 1) % LL_EVERY == 0:
            ll = _joint_log_likelihood(n_dt, n_tw, n_t, doc_lengths, alpha, beta)
            ll_trace.append((sweep, ll))
            if recorded:
                token_ll.append(ll / n_tokens)
        if recorded:
            phi_acc += (n_tw + beta) / (n_t + vocab_size * beta)[:, None]
            theta_acc += (n_dt + alpha) / (doc_lengths + n_topics * alpha)[:, None]
            n_recorded += 1

    return LdaModel(
        n_topics=n_topics,
        vocab_size=vocab_size,
        alpha=alpha,
        beta=beta,
        alpha_mode=alpha_mode,
        phi=phi_acc / n_recorded,
        theta=theta_acc / n_recorded,
        ll_trace=tuple(ll_trace),
        mean_token_ll=float(np.mean(token_ll)),
        n_sweeps=n_sweeps,
        seed=seed,
        n_tokens=n_tokens,
    )


def select_n_topics(
    docs: list[np.ndarray],
    vocab_size: int,
    candidates: list[int],
    n_sweeps: int = 200,
    seed: int = 0,
    alpha_mode: str = "inverse",
    beta: float = 0.01,
) -> tuple[int, dict[int, float], dict[int, LdaModel]]:
    """Fit every candidate topic count and keep the best scorer.

    The score is the mean per-token joint log-likelihood over the final
    quarter of sweeps; exact ties go to the smaller candidate. Returns
    (best_T, scores, fitted models) so the winning fit can be reused
    without retraining.
    """
    cands = sorted(set(int(c) for c in candidates))
    if not cands:
        raise ValueError("candidates must be non-empty")
    scores: dict[int, float] = {}
    models: dict[int, LdaModel] = {}
    for T in cands:
        child = int(
            np.random.SeedSequence(entropy=seed, spawn_key=(T,)).generate_state(1)[0]
        )
        model = lda_gibbs(
            docs,
            vocab_size,
            T,
            n_sweeps=n_sweeps,
            seed=child,
            alpha_mode=alpha_mode,
            beta=beta,
        )
        scores[T] = model.mean_token_ll
        models[T] = model
    best = max(cands, key=lambda T: (scores[T], -T))
    return best, scores, models


def fold_in_theta(
    model: LdaModel,
    docs: list[np.ndarray],
    n_sweeps: int = 50,
    seed: int = 0,
) -> np.ndarray:
    """Topic mixtures for documents unseen at training time.

    phi stays fixed; only the new documents' topic counts are sampled.
    Empty documents get the uniform mixture.
    """
    T = model.n_topics
    doc_lengths = np.array([len(d) for d in docs], dtype=np.int64)
    n_tokens = int(doc_lengths.sum())
    if n_tokens == 0:
        return np.full((len(docs), T), 1.0 / T)
    tokens = np.concatenate([d for d in docs if len(d)]).astype(np.int64)
    if tokens.min() < 0 or tokens.max() >= model.vocab_size:
        raise ValueError("token id outside the vocabulary")
    doc_of = np.repeat(np.arange(len(docs), dtype=np.int64), doc_lengths)

    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(13,)))
    z = rng.integers(0, T, size=n_tokens, dtype=np.int64)
    n_dt = np.zeros((len(docs), T), dtype=np.int64)
    np.add.at(n_dt, (doc_of, z), 1)

    record_from = n_sweeps - max(1, n_sweeps // 4)
    theta_acc = np.zeros((len(docs), T), dtype=np.float64)
    n_recorded = 0
    phi = np.ascontiguousarray(model.phi)
    for sweep in range(n_sweeps):
        u = rng.random(n_tokens)
        _fold_in_sweep(tokens, doc_of, z, n_dt, phi, model.alpha, u)
        if sweep >= record_from:
            theta_acc += (n_dt + model.alpha) / (doc_lengths + T * model.alpha)[:, None]
            n_recorded += 1
    theta = theta_acc / n_recorded
    empty = doc_lengths == 0
    theta[empty] = 1.0 / T
    return theta
