"""Entity grammar and tokenizer contracts.

Golden values here were derived by hand from the grammar definition
(hashtag = '#' + word chars, mention = '@' + word chars, url = token
starting with http(s)://, retweet = 'RT @' prefix) and frozen before
the implementation existed.
"""

import numpy as np

from veriscore import text


class TestEntityGrammar:
    def test_golden_retweet_line(self):
        raw = "RT @bob: hi #news http://x.y"
        assert text.is_retweet_text(raw) is True
        assert text.extract_mentions(raw) == ["bob"]
        assert text.extract_hashtags(raw) == ["news"]
        assert text.extract_urls(raw) == ["http://x.y"]

    def test_multiple_entities_in_order(self):
        raw = "#a then #b and @x @y see https://one.example http://two.example"
        assert text.extract_hashtags(raw) == ["a", "b"]
        assert text.extract_mentions(raw) == ["x", "y"]
        assert text.extract_urls(raw) == ["https://one.example", "http://two.example"]

    def test_url_fragments_are_not_entities(self):
        # '#' and '@' inside a url belong to the url token
        raw = "read http://site.example/page#frag?u=@me now"
        assert text.extract_urls(raw) == ["http://site.example/page#frag?u=@me"]
        assert text.extract_hashtags(raw) == []
        assert text.extract_mentions(raw) == []

    def test_no_empty_entity_strings(self):
        raw = "# @ stray markers http://"
        assert all(text.extract_hashtags(raw))
        assert all(text.extract_mentions(raw))
        # 'http://' alone is still a token starting with the scheme
        for url in text.extract_urls(raw):
            assert url

    def test_retweet_requires_prefix(self):
        assert text.is_retweet_text("RT @a: x") is True
        assert text.is_retweet_text("rt @a: x") is False
        assert text.is_retweet_text("via RT @a") is False


class TestTokenizer:
    def test_golden_two_sentences(self):
        words, n_sent = text.tokenize("Go! Now http://a.b")
        assert words == ["go", "now"]
        assert n_sent == 2

    def test_hello_world(self):
        words, n_sent = text.tokenize("Hello, world!")
        assert words == ["hello", "world"]
        assert n_sent == 1

    def test_empty_text(self):
        assert text.tokenize("") == ([], 0)

    def test_non_empty_text_has_at_least_one_sentence(self):
        for raw in ["hi", "hi.", "...", "!!!", "#tag", "@m", "http://a.b"]:
            _, n_sent = text.tokenize(raw)
            assert n_sent >= 1, raw

    def test_apostrophes_stay_inside_words(self):
        words, _ = text.tokenize("Don't can't won't")
        assert words == ["don't", "can't", "won't"]

    def test_entities_are_not_words(self):
        words, _ = text.tokenize("check #tag and @user at http://a.b please")
        assert words == ["check", "and", "at", "please"]

    def test_digits_count_as_word_chars(self):
        words, _ = text.tokenize("win 100 times in 2018")
        assert words == ["win", "100", "times", "in", "2018"]

    def test_url_dots_do_not_split_sentences(self):
        _, n_sent = text.tokenize("see http://a.b.c/d.e now")
        assert n_sent == 1

    def test_tokenize_is_pure(self):
        rng = np.random.default_rng(7)
        alphabet = list("abc .!?#@'")
        for _ in range(50):
            raw = "".join(rng.choice(alphabet, size=rng.integers(0, 30)))
            assert text.tokenize(raw) == text.tokenize(raw)

    def test_letter_count_ignores_digits_and_apostrophes(self):
        assert text.letter_count("tomorrow") == 8
        assert text.letter_count("don't") == 4
        assert text.letter_count("a1b2c3") == 3
