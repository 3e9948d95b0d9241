import json
import unittest

import numpy as np

from src.data.dataset import PreparedUser
from src.data.features import LAYOUT
from src.data.synth import signal_vocabulary
from src.explain.attention import token_weights, extract_attention_batch, extract_attention
from src.model.models.mdhan import MDHAN
from src.model.trainer import MDHANTrainer
from src.utils import make_rng
from tests.synthetic import tiny_config, tiny_dataset


def make_user(user_id: str, label: int, token_ids: list[list[int]], seed: int = 0) -> PreparedUser:
    features = make_rng(seed).normal(size=LAYOUT.total)

    return PreparedUser(user_id=user_id,
                        label=label,
                        tweet_texts=[f"tweet {user_id} {position}" for position in range(len(token_ids))],
                        tweet_tokens=[[f"w{idx}" for idx in ids] for ids in token_ids],
                        token_ids=token_ids,
                        features=features,
                        raw_features=features)


def embedding_matrix(vocab_size: int = 20, embed_dim: int = 8) -> np.ndarray:
    matrix = make_rng(0).normal(size=(vocab_size + 1, embed_dim))
    matrix[0] = 0
    return matrix


class TestTokenWeights(unittest.TestCase):

    def test_no_pooling(self):
        word_alpha = np.array([0.5, 0.3, 0.2, 0.0, 0.0])

        np.testing.assert_array_equal(token_weights(word_alpha, 3), [0.5, 0.3, 0.2])

    def test_pooling(self):
        # 5 tokens in windows of 2: the last window has a single token
        weights = token_weights(np.array([0.5, 0.3, 0.2]), 5, max_pool_words=2)

        np.testing.assert_allclose(weights, [0.25, 0.25, 0.15, 0.15, 0.2])
        self.assertAlmostEqual(weights.sum(), 1.0)


class TestExtractAttention(unittest.TestCase):

    def setUp(self) -> None:
        self.model = MDHAN.from_config(tiny_config(), embedding_matrix())
        self.users = [make_user("a", 1, [[1, 2, 3], [4, 5]], seed=1),
                      make_user("b", 0, [[6], [7, 8, 9, 10], [], [13]], seed=2),
                      make_user("c", 1, [[14, 15, 16, 17, 18, 19, 20]], seed=3)]

    def test_report(self):
        reports = extract_attention_batch(self.model, self.users)

        self.assertEqual([report.user_id for report in reports], ["a", "b", "c"])
        np.testing.assert_allclose([report.y_hat for report in reports], self.model.predict_proba(self.users),
                                   atol=1e-12)

        report = reports[1]
        self.assertEqual(report.label, 0)
        # the empty tweet is not part of the explained timeline
        self.assertEqual(len(report.tweets), 3)
        visible_texts = ["tweet b 0", "tweet b 1", "tweet b 3"]

        # tweets ranked by weight, ties by position
        keys = [(-tweet.weight, tweet.position) for tweet in report.tweets]
        self.assertEqual(keys, sorted(keys))
        self.assertAlmostEqual(sum(tweet.weight for tweet in report.tweets), 1.0)

        for tweet in report.tweets:
            self.assertEqual(tweet.text, visible_texts[tweet.position])
            self.assertEqual(sorted(token.position for token in tweet.tokens), list(range(len(tweet.tokens))))

            self.assertGreater(tweet.weight, 0.0)
            self.assertAlmostEqual(sum(token.weight for token in tweet.tokens), 1.0)
            token_keys = [(-token.weight, token.position) for token in tweet.tokens]
            self.assertEqual(token_keys, sorted(token_keys))

    def test_same_weights_as_forward(self):
        output = self.model.forward(self.model.make_batch(self.users))

        report = extract_attention(self.model, self.users[0])

        for tweet in report.tweets:
            self.assertAlmostEqual(tweet.weight, output.tweet_alpha[0, tweet.position])
            for token in tweet.tokens:
                self.assertAlmostEqual(token.weight, output.word_alpha[0, tweet.position, token.position])
                self.assertEqual(token.token, self.users[0].tweet_tokens[tweet.position][token.position])

    def test_batch_size_independent(self):
        small_batches = MDHAN(self.model.config.replace(batch_size=1), self.model.params)

        for report, small_report in zip(extract_attention_batch(self.model, self.users),
                                        extract_attention_batch(small_batches, self.users)):
            self.assertAlmostEqual(report.y_hat, small_report.y_hat)
            self.assertEqual([tweet.position for tweet in report.tweets],
                             [tweet.position for tweet in small_report.tweets])

    def test_truncation(self):
        model = MDHAN(self.model.config.replace(l_max=2, n_max=2), self.model.params)

        report = extract_attention(model, self.users[1])

        # only the two most recent non-empty tweets, each one with at most n_max tokens
        self.assertEqual(sorted(tweet.text for tweet in report.tweets), ["tweet b 1", "tweet b 3"])
        self.assertTrue(all(len(tweet.tokens) <= 2 for tweet in report.tweets))

    def test_max_pool(self):
        model = MDHAN(self.model.config.replace(max_pool_words=2), self.model.params)

        report = extract_attention(model, self.users[2])

        [tweet] = report.tweets
        self.assertEqual(len(tweet.tokens), 7)
        self.assertAlmostEqual(sum(token.weight for token in tweet.tokens), 1.0)

    def test_to_json(self):
        report = extract_attention(self.model, self.users[0])

        report_dict = json.loads(report.to_json())

        self.assertEqual(report_dict["user_id"], "a")
        self.assertEqual(report_dict["prediction"], int(report.y_hat >= 0.5))
        self.assertEqual(len(report_dict["tweets"]), 2)
        self.assertEqual(set(report_dict["tweets"][0]["tokens"][0]), {"token", "position", "weight"})

    def test_needs_tweets(self):
        model = MDHAN.from_config(tiny_config(use_tweets=False), embedding_matrix())

        with self.assertRaises(ValueError):
            extract_attention_batch(model, self.users)


class TestTrainedAttention(unittest.TestCase):

    def test_signal_tweets_get_more_weight(self):
        # half of the tweets of a depressed user are signal-bearing, in the text only
        dataset = tiny_dataset(n_users=32, signal=0.5, seed=4, channels=("text",))
        model = MDHAN.from_config(tiny_config(epochs=30, use_modalities=False), dataset.embedding_matrix)
        MDHANTrainer(model).train(dataset.train_users)

        signal_words = set(signal_vocabulary())
        depressed = [user for user in dataset.train_users + dataset.test_users if user.label == 1]

        signal_weights, noise_weights = [], []
        for report in extract_attention_batch(model, depressed):
            for tweet in report.tweets:
                if {token.token for token in tweet.tokens} <= signal_words:
                    signal_weights.append(tweet.weight)
                else:
                    noise_weights.append(tweet.weight)

        self.assertGreater(len(signal_weights), 0)
        self.assertGreater(len(noise_weights), 0)
        self.assertGreater(np.mean(signal_weights), np.mean(noise_weights))


if __name__ == '__main__':
    unittest.main()
