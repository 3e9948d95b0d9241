import unittest

from src.data.preprocess import tokenize, preprocess_tweet, N_MAX


class TestPreprocess(unittest.TestCase):

    def test_tokenize(self):
        text = "Feeling SO tired today... @john check https://t.co/xyz #insomnia www.site.com"

        self.assertEqual(tokenize(text), ["feeling", "so", "tired", "today", "check", "insomnia"])

    def test_tokenize_non_ascii(self):
        # emoji and accented characters are deleted, a token made only of them disappears
        self.assertEqual(tokenize("café 😢 ok"), ["caf", "ok"])

    def test_tokenize_inner_punctuation(self):
        # only leading and trailing punctuation is stripped
        self.assertEqual(tokenize("can't \"stop\" (now)!"), ["can't", "stop", "now"])

    def test_preprocess_stopwords(self):
        stopwords = frozenset({"i", "am", "so"})

        self.assertEqual(preprocess_tweet("I am so tired", stopwords), ["tired"])

    def test_preprocess_truncation(self):
        text = " ".join(f"word{idx}" for idx in range(N_MAX + 10))

        tokens = preprocess_tweet(text, frozenset())
        self.assertEqual(len(tokens), N_MAX)
        self.assertEqual(tokens[-1], f"word{N_MAX - 1}")

        self.assertEqual(len(preprocess_tweet(text, frozenset(), n_max=None)), N_MAX + 10)
        self.assertEqual(preprocess_tweet(text, frozenset(), n_max=2), ["word0", "word1"])

    def test_preprocess_empty(self):
        self.assertEqual(preprocess_tweet("@someone http://a.b", frozenset()), [])


if __name__ == '__main__':
    unittest.main()
