import os
import shutil
import unittest

import numpy as np
import pandas as pd

from src.data.dataset import BluebirdDataset, PreparedUser
from tests.synthetic import tiny_dataset


class TestBluebirdDataset(unittest.TestCase):

    @classmethod
    def setUpClass(cls) -> None:
        cls.dataset = tiny_dataset(n_users=12, embedding_dim=8)

    def test_splits(self):
        self.assertEqual(len(self.dataset.train_users), 6)
        self.assertEqual(len(self.dataset.test_users), 6)

        train_ids = {user.user_id for user in self.dataset.train_users}
        test_ids = {user.user_id for user in self.dataset.test_users}
        self.assertEqual(train_ids & test_ids, set())

    def test_embedding_matrix(self):
        matrix = self.dataset.embedding_matrix

        self.assertEqual(matrix.shape, (len(self.dataset.vocab) + 1, 8))
        np.testing.assert_array_equal(matrix[0], np.zeros(8))

        token = self.dataset.vocab[0]
        self.assertEqual(self.dataset.token2id[token], 1)

    def test_prepared_users(self):
        for user in self.dataset.train_users + self.dataset.test_users:
            self.assertEqual(user.features.shape, (76,))
            self.assertEqual(user.raw_features.shape, (76,))
            self.assertEqual(len(user.tweet_texts), len(user.tweet_tokens))
            self.assertTrue(all(len(tokens) <= self.dataset.n_max for tokens in user.tweet_tokens))

            for tokens, ids in zip(user.tweet_tokens, user.token_ids):
                self.assertEqual(ids, [self.dataset.token2id.get(token, 0) for token in tokens])

        # normalization statistics come from the train split only
        train_features = np.stack([user.features for user in self.dataset.train_users])
        np.testing.assert_allclose(train_features.mean(axis=0), np.zeros(76), atol=1e-6)

    def test_prepare_unseen_user(self):
        corpus_user = self.dataset.test_corpus.users[0]

        prepared = self.dataset.prepare(corpus_user)

        np.testing.assert_allclose(prepared.raw_features, self.dataset.test_users[0].raw_features)
        np.testing.assert_allclose(prepared.features, self.dataset.test_users[0].features)

    def test_truncated(self):
        user = self.dataset.train_users[0]

        truncated = user.truncated(3)

        self.assertIsInstance(truncated, PreparedUser)
        self.assertEqual(truncated.tweet_texts, user.tweet_texts[-3:])
        self.assertEqual(truncated.token_ids, user.token_ids[-3:])
        np.testing.assert_array_equal(truncated.features, user.features)

        self.assertEqual(user.truncated(1000).tweet_texts, user.tweet_texts)

    def test_save_load_export(self):
        self.dataset.save("to_del")
        self.dataset.export_features("to_del")

        loaded = BluebirdDataset.load("to_del")
        self.assertEqual([user.user_id for user in loaded.train_users],
                         [user.user_id for user in self.dataset.train_users])
        np.testing.assert_array_equal(loaded.embedding_matrix, self.dataset.embedding_matrix)

        train_df = pd.read_csv("to_del/features_train.csv", index_col="user_id")
        self.assertEqual(train_df.shape, (6, 76))
        np.testing.assert_allclose(train_df.to_numpy(), self.dataset.train_raw_features)

        self.assertTrue(os.path.isfile("to_del/features_test.csv"))

        with self.assertRaises(FileNotFoundError):
            BluebirdDataset.load("to_del/missing")

    @classmethod
    def tearDownClass(cls) -> None:
        shutil.rmtree("to_del", ignore_errors=True)


if __name__ == '__main__':
    unittest.main()
