"""Feature family contracts: sentiment, POS, content, temporal, assembly."""

import numpy as np
import pytest

from veriscore import corpus as C
from veriscore.features import (
    POS_TAGS,
    assemble_features,
    build_registry,
    char_entropy,
    content_features,
    load_pos_lexicon,
    load_sentiment_lexicon,
    metadata_features,
    read_features_csv,
    score_tweet,
    score_user,
    tag_word,
    temporal_features,
    write_features_csv,
)
from veriscore.features.extract import gain_fraction, locf_average, locf_value
from veriscore.features.registry import CONTENT_FEATURES
from veriscore.features.sentiment import normalize

SENT = load_sentiment_lexicon()
POS = load_pos_lexicon()

WINDOW = C.CollectionWindow(
    start=C.parse_timestamp("2017-06-01T00:00:00Z"),
    end=C.parse_timestamp("2018-05-31T00:00:00Z"),
    snapshot=C.parse_timestamp("2018-07-18T00:00:00Z"),
)


def make_tweet(uid, tid, text, created="2017-07-01T00:00:00Z", retweet=False):
    from veriscore.text import extract_hashtags, extract_mentions, extract_urls, is_retweet_text

    return C.TweetRecord(
        user_id=uid,
        tweet_id=tid,
        created_at=C.parse_timestamp(created),
        text=text,
        hashtags=tuple(extract_hashtags(text)),
        mentions=tuple(extract_mentions(text)),
        urls=tuple(extract_urls(text)),
        is_retweet=retweet or is_retweet_text(text),
    )


def make_profile(uid, verified=False, created="2015-01-01T00:00:00Z", **kw):
    base = dict(followers_count=10, friends_count=5, statuses_count=100, listed_count=1)
    base.update(kw)
    return C.UserProfile(user_id=uid, created_at=C.parse_timestamp(created), verified=verified, **base)


class TestSentiment:
    def test_compound_normalization_shape(self):
        # compound = s / sqrt(s^2 + 15), zero at zero, in (-1, 1)
        assert normalize(0.0) == 0.0
        for s in np.linspace(-30, 30, 61):
            v = normalize(s)
            assert -1.0 < v < 1.0
            assert v == pytest.approx(s / np.sqrt(s * s + 15.0))

    def test_triple_sums_to_one(self):
        rng = np.random.default_rng(11)
        vocab = list(SENT.valence) + ["platypus", "table", "walk", "the"]
        for _ in range(200):
            words = list(rng.choice(vocab, size=rng.integers(1, 12)))
            p, n, u, c = score_tweet(words, SENT)
            assert p + n + u == pytest.approx(1.0, abs=1e-9)
            assert -1.0 < c < 1.0

    def test_wordless_tweet_is_neutral(self):
        assert score_tweet([], SENT) == (0.0, 0.0, 1.0, 0.0)

    def test_zero_valence_words_are_fully_neutral(self):
        p, n, u, c = score_tweet(["table", "chair", "lamp"], SENT)
        assert (p, n, u, c) == (0.0, 0.0, 1.0, 0.0)

    def test_negation_flips_and_damps(self):
        base = SENT.valence["good"]
        (_, _, _, plain) = score_tweet(["good"], SENT)
        (_, _, _, negated) = score_tweet(["not", "good"], SENT)
        assert plain == pytest.approx(normalize(base))
        assert negated == pytest.approx(normalize(base * -0.74))
        assert negated < 0 < plain

    def test_intensifier_boosts(self):
        base = SENT.valence["good"]
        (_, _, _, boosted) = score_tweet(["very", "good"], SENT)
        assert boosted == pytest.approx(normalize(base + 0.293))
        (_, _, _, damped) = score_tweet(["slightly", "good"], SENT)
        assert damped == pytest.approx(normalize(base - 0.293))
        bad = SENT.valence["bad"]
        (_, _, _, worse) = score_tweet(["very", "bad"], SENT)
        assert worse == pytest.approx(normalize(bad - 0.293))

    def test_identical_tweets_average_to_themselves(self):
        words = ["good"] * 10
        single = score_tweet(words, SENT)
        assert score_user([words, words, words], SENT) == pytest.approx(single)

    def test_opposite_compounds_cancel_at_equal_length(self):
        # two tweets with equal word counts and opposite compounds
        w_pos = ["good"] + ["x"] * 9
        w_neg = ["bad"] + ["x"] * 9
        c_pos = score_tweet(w_pos, SENT)[3]
        c_neg = score_tweet(w_neg, SENT)[3]
        agg = score_user([w_pos, w_neg], SENT)[3]
        assert agg == pytest.approx((c_pos + c_neg) / 2)

    def test_user_weighted_mean_formula(self):
        w1 = ["good", "x", "y"]            # len 3
        w2 = ["bad", "awful", "a", "b", "c", "d", "e"]  # len 7
        s1 = np.array(score_tweet(w1, SENT))
        s2 = np.array(score_tweet(w2, SENT))
        expect = (3 * s1 + 7 * s2) / 10
        assert np.allclose(score_user([w1, w2], SENT), expect, atol=1e-12)

    def test_user_with_no_words_is_neutral(self):
        assert score_user([[], []], SENT) == (0.0, 0.0, 1.0, 0.0)


class TestPos:
    def test_closed_classes(self):
        assert tag_word("the", POS) == "article"
        assert tag_word("she", POS) == "pron_personal"
        assert tag_word("it", POS) == "pron_impersonal"
        assert tag_word("of", POS) == "preposition"
        assert tag_word("is", POS) == "verb_aux"

    def test_suffix_heuristics(self):
        assert tag_word("quickly", POS) == "adverb"
        assert tag_word("jumping", POS) == "verb"
        assert tag_word("jumped", POS) == "verb"
        assert tag_word("famous", POS) == "adjective"
        assert tag_word("colorful", POS) == "adjective"

    def test_lexicon_wins_over_suffix(self):
        # 'being' ends in -ing but is an auxiliary
        assert tag_word("being", POS) == "verb_aux"

    def test_default_noun(self):
        assert tag_word("platypus", POS) == "noun"
        assert tag_word("zzz", POS) == "noun"


class TestEntropy:
    def test_uniform_alphabet_hits_log2_k(self):
        rng = np.random.default_rng(3)
        for k in (1, 2, 4, 8, 16):
            symbols = [chr(ord("a") + i) for i in range(k)]
            text = "".join(rng.permutation(np.repeat(symbols, 40)))
            assert char_entropy([text]) == pytest.approx(np.log2(k), abs=1e-9)

    def test_single_symbol_zero(self):
        assert char_entropy(["aaaa"]) == 0.0

    def test_empty_zero(self):
        assert char_entropy([]) == 0.0
        assert char_entropy([""]) == 0.0

    def test_concatenation_across_tweets(self):
        assert char_entropy(["ab", "ab"]) == pytest.approx(1.0, abs=1e-12)


class TestContentFeatures:
    def idx(self, name):
        return CONTENT_FEATURES.index(name)

    def test_requires_tweets(self):
        with pytest.raises(ValueError):
            content_features((), SENT, POS)

    def test_entity_frequencies_per_tweet(self):
        tweets = tuple(
            make_tweet("u", f"t{i}", text)
            for i, text in enumerate(
                ["#a one", "#b two", "plain three", "plain four"]
            )
        )
        v = content_features(tweets, SENT, POS)
        assert v[self.idx("hashtag_count")] == 2.0
        assert v[self.idx("hashtags_per_tweet")] == pytest.approx(0.5)

    def test_retweet_fraction(self):
        tweets = (
            make_tweet("u", "t1", "RT @x: hi"),
            make_tweet("u", "t2", "hello"),
        )
        v = content_features(tweets, SENT, POS)
        assert v[self.idx("retweet_count")] == 1.0
        assert v[self.idx("retweets_per_tweet")] == pytest.approx(0.5)

    def test_long_words(self):
        tweets = (make_tweet("u", "t1", "tomorrow is go"),)
        v = content_features(tweets, SENT, POS)
        assert v[self.idx("long_word_count")] == 1.0
        assert v[self.idx("long_word_fraction")] == pytest.approx(1 / 3)

    def test_avg_words(self):
        tweets = (
            make_tweet("u", "t1", "one two three. four five!"),  # 5 words, 2 sentences
            make_tweet("u", "t2", "six seven"),                  # 2 words, 1 sentence
        )
        v = content_features(tweets, SENT, POS)
        assert v[self.idx("avg_words_per_tweet")] == pytest.approx(3.5)
        assert v[self.idx("avg_words_per_sentence")] == pytest.approx(7 / 3)

    def test_pos_freqs_sum_to_one(self):
        tweets = (make_tweet("u", "t1", "the cat quickly jumped over it"),)
        v = content_features(tweets, SENT, POS)
        freqs = [v[self.idx(f"pos_freq_{t}")] for t in POS_TAGS]
        assert sum(freqs) == pytest.approx(1.0, abs=1e-9)

    def test_doubling_tweets_doubles_counts_not_frequencies(self):
        tweets = tuple(
            make_tweet("u", f"t{i}", text)
            for i, text in enumerate(["#a good day.", "RT @b: not bad http://x.y", "plain words here"])
        )
        v1 = content_features(tweets, SENT, POS)
        doubled = tweets + tuple(
            make_tweet("u", f"d{i}", t.text, retweet=t.is_retweet) for i, t in enumerate(tweets)
        )
        v2 = content_features(doubled, SENT, POS)
        count_names = [f"pos_count_{t}" for t in POS_TAGS] + [
            "long_word_count", "hashtag_count", "mention_count", "url_count", "retweet_count",
        ]
        for name in count_names:
            assert v2[self.idx(name)] == pytest.approx(2 * v1[self.idx(name)]), name
        for name in [
            "avg_words_per_sentence", "avg_words_per_tweet", "char_entropy_bits",
            "long_word_fraction", "sentiment_pos", "sentiment_neg", "sentiment_neu",
            "sentiment_compound", "hashtags_per_tweet", "mentions_per_tweet",
            "urls_per_tweet", "retweets_per_tweet",
        ] + [f"pos_freq_{t}" for t in POS_TAGS]:
            assert v2[self.idx(name)] == pytest.approx(v1[self.idx(name)], abs=1e-12), name


class TestMetadata:
    def test_account_age_floor(self):
        p = make_profile("u", created="2018-07-16T01:00:00Z")
        v = metadata_features(p, WINDOW)
        # 1.958 days -> floor 1
        assert v[4] == 1.0

    def test_counter_passthrough(self):
        p = make_profile("u", followers_count=7, friends_count=8, statuses_count=9, listed_count=3)
        v = metadata_features(p, WINDOW)
        assert list(v[:4]) == [7.0, 8.0, 9.0, 3.0]


def series_from(points, uid="u"):
    return C.StatTimeSeries(
        user_id=uid,
        points=tuple(
            C.StatPoint(
                timestamp=C.parse_timestamp(ts), followers=f, friends=fr, statuses=s
            )
            for ts, f, fr, s in points
        ),
    )


class TestTemporal:
    def test_locf_lookup_and_backfill(self):
        ts = np.array([10.0, 20.0, 30.0])
        vs = np.array([1.0, 2.0, 3.0])
        assert locf_value(ts, vs, 5.0) == 1.0    # backfill
        assert locf_value(ts, vs, 10.0) == 1.0
        assert locf_value(ts, vs, 25.0) == 2.0
        assert locf_value(ts, vs, 99.0) == 3.0

    def test_locf_average_step_function(self):
        ts = np.array([0.0, 10.0])
        vs = np.array([0.0, 10.0])
        # value 0 on [0,10), 10 on [10,20): mean over [0,20] = 5
        assert locf_average(ts, vs, 0.0, 20.0) == pytest.approx(5.0)

    def test_gain_fraction_clamped(self):
        ts = np.array([0.0, 50 * 86400.0])
        vs = np.array([100.0, 80.0])  # followers dropped
        assert gain_fraction(ts, vs, 100 * 86400.0, 90.0) == 0.0
        vs2 = np.array([0.0, 80.0])
        assert gain_fraction(ts, vs2, 100 * 86400.0, 90.0) == pytest.approx(1.0)

    def test_status_interval_golden(self):
        # 364-day window, 52 statuses authored -> 7 days between statuses
        win = C.CollectionWindow(
            start=C.parse_timestamp("2017-06-01T00:00:00Z"),
            end=C.parse_timestamp("2018-05-31T00:00:00Z"),
            snapshot=C.parse_timestamp("2018-07-18T00:00:00Z"),
        )
        assert win.length_days == pytest.approx(364.0)
        s = series_from(
            [
                ("2017-06-01T00:00:00Z", 10, 10, 100),
                ("2018-05-30T00:00:00Z", 10, 10, 152),
            ]
        )
        v = temporal_features(s, win)
        assert v[-1] == pytest.approx(364.0 / 52.0)

    def test_zero_statuses_interval_is_window_length(self):
        s = series_from([("2017-06-01T00:00:00Z", 10, 10, 100)])
        v = temporal_features(s, WINDOW)
        assert v[-1] == pytest.approx(WINDOW.length_days)


def tiny_corpus(with_external=("u1",), with_series=("u1",), tweetless=()):
    users = ["u1", "u2", "u3"]
    profiles = {
        "u1": make_profile("u1", verified=True),
        "u2": make_profile("u2"),
        "u3": make_profile("u3"),
    }
    tweets = {
        u: (make_tweet(u, f"{u}-t1", f"hello from {u}. #tag"),)
        for u in users
        if u not in tweetless
    }
    series = {
        u: series_from(
            [
                ("2017-06-01T00:00:00Z", 5, 2, 10),
                ("2018-01-01T00:00:00Z", 9, 3, 40),
            ],
            uid=u,
        )
        for u in with_series
    }
    external = {
        u: C.ExternalScores(
            user_id=u, analytic=50.0, clout=60.0, authentic=40.0, tone=55.0,
            cap=0.1, network=0.5, content=0.6, temporal=0.7,
        )
        for u in with_external
    }
    return C.Corpus(profiles=profiles, tweets=tweets, series=series, external=external, window=WINDOW)


class TestAssembly:
    def test_shapes_and_masks(self):
        corpus = tiny_corpus(with_external=("u1",), with_series=("u1",), tweetless=("u3",))
        reg = build_registry()
        m = assemble_features(corpus, reg, SENT, POS)
        assert m.X.shape == (3, len(reg))
        ext_idx = reg.family_indices("external")
        con_idx = reg.family_indices("content")
        i_u2 = m.user_ids.index("u2")
        i_u3 = m.user_ids.index("u3")
        assert m.mask[i_u2, ext_idx].all()
        assert m.mask[i_u3, con_idx].all()
        # u3 has no tweets: content defaults, neutral sentiment 1
        assert m.X[i_u3, reg.index("sentiment_neu")] == 1.0
        assert m.X[i_u3, reg.index("sentiment_compound")] == 0.0

    def test_external_imputed_with_training_median(self):
        corpus = tiny_corpus(with_external=("u1", "u2"))
        reg = build_registry()
        # u2 is the only training user with external scores; u3 imputed from it
        ext = {**corpus.external}
        ext["u2"] = C.ExternalScores(
            user_id="u2", analytic=80.0, clout=20.0, authentic=10.0, tone=15.0,
            cap=0.9, network=0.1, content=0.2, temporal=0.3,
        )
        corpus = C.Corpus(
            profiles=corpus.profiles, tweets=corpus.tweets, series=corpus.series,
            external=ext, window=corpus.window,
        )
        m = assemble_features(corpus, reg, SENT, POS, impute_user_ids=["u2"])
        i_u3 = m.user_ids.index("u3")
        assert m.X[i_u3, reg.index("ext_analytic")] == 80.0
        assert m.X[i_u3, reg.index("ext_cap")] == pytest.approx(0.9)

    def test_label_blind(self):
        corpus = tiny_corpus()
        reg = build_registry()
        m1 = assemble_features(corpus, reg, SENT, POS)
        flipped_profiles = {
            uid: C.UserProfile(
                user_id=p.user_id, created_at=p.created_at,
                followers_count=p.followers_count, friends_count=p.friends_count,
                statuses_count=p.statuses_count, listed_count=p.listed_count,
                verified=not p.verified,
            )
            for uid, p in corpus.profiles.items()
        }
        corpus2 = C.Corpus(
            profiles=flipped_profiles, tweets=corpus.tweets, series=corpus.series,
            external=corpus.external, window=corpus.window,
        )
        m2 = assemble_features(corpus2, reg, SENT, POS)
        assert np.array_equal(m1.X, m2.X)
        assert np.array_equal(m1.mask, m2.mask)

    def test_topic_block_requires_theta(self):
        corpus = tiny_corpus()
        reg = build_registry(n_topics=4)
        with pytest.raises(ValueError):
            assemble_features(corpus, reg, SENT, POS)
        theta = {"u1": np.array([0.7, 0.1, 0.1, 0.1])}
        m = assemble_features(corpus, reg, SENT, POS, topic_theta=theta)
        t_idx = reg.family_indices("topic")
        i_u1 = m.user_ids.index("u1")
        i_u2 = m.user_ids.index("u2")
        assert np.allclose(m.X[i_u1, t_idx], [0.7, 0.1, 0.1, 0.1])
        assert np.allclose(m.X[i_u2, t_idx], 0.25)  # uniform fallback
        assert m.mask[i_u2, t_idx].all()
        assert not m.mask[i_u1, t_idx].any()

    def test_csv_round_trip(self, tmp_path):
        corpus = tiny_corpus(with_external=("u1",), with_series=("u1", "u2"), tweetless=("u2",))
        reg = build_registry(n_topics=3)
        theta = {"u1": np.array([0.5, 0.25, 0.25])}
        m = assemble_features(corpus, reg, SENT, POS, topic_theta=theta)
        labels = np.array([1, 0, 0])
        split = ["train", "train", "test"]
        path = tmp_path / "features.csv"
        write_features_csv(path, m, labels, split)
        uids, labs, spl, X, mask = read_features_csv(path, reg)
        assert uids == m.user_ids
        assert list(labs) == [1, 0, 0]
        assert spl == split
        assert np.array_equal(X, m.X)
        assert np.array_equal(mask, m.mask)
