import dataclasses
import os
import shutil
import unittest
from datetime import timedelta

import pandas as pd

from src.data.corpus import Corpus, TweetRecord
from src.data.synth import synth_corpus
from src.evaluate.experiments import run_ablations, tweet_count_sweep, train_and_evaluate
from tests.synthetic import prepare_corpus, tiny_dataset, tiny_config


class TestExperiments(unittest.TestCase):

    @classmethod
    def setUpClass(cls) -> None:
        cls.dataset = tiny_dataset(n_users=12)
        cls.config = tiny_config(epochs=1)

    def test_train_and_evaluate(self):
        report1, history1 = train_and_evaluate(self.dataset, self.config)
        report2, history2 = train_and_evaluate(self.dataset, self.config)

        self.assertEqual(report1, report2)
        self.assertEqual(history1, history2)
        self.assertEqual(len(history1), 1)

    def test_run_ablations(self):
        names = ["MM-only", "MDHAN", "HAN-only"]

        res_df = run_ablations(names, self.dataset, self.config, n_workers=2,
                               output_dir="to_del", create_latex=True)

        self.assertEqual(list(res_df.index), names)
        self.assertEqual(res_df.index.name, "configuration")
        self.assertEqual(list(res_df.columns), ["accuracy", "precision", "recall", "f1"])

        # threads don't change the results
        sequential_df = run_ablations(names, self.dataset, self.config, n_workers=1)
        pd.testing.assert_frame_equal(res_df, sequential_df)

        saved_df = pd.read_csv(os.path.join("to_del", "ablation.csv"), index_col="configuration")
        self.assertEqual(list(saved_df.index), names)
        self.assertTrue(os.path.isfile(os.path.join("to_del", "ablation_latex.tex")))

    def test_run_ablations_errors(self):
        with self.assertRaises(ValueError):
            run_ablations(["MDHAN", "mdhan"], self.dataset, self.config)

        with self.assertRaises(KeyError):
            run_ablations(["MDHAN-X"], self.dataset, self.config)

    def test_tweet_count_sweep(self):
        res_df = tweet_count_sweep(self.dataset, self.config, [5, 1, 5], output_dir="to_del")

        self.assertEqual(list(res_df["L"]), [1, 5])
        self.assertEqual(list(res_df.columns), ["L", "accuracy", "precision", "recall", "f1"])

        saved_df = pd.read_csv(os.path.join("to_del", "sweep.csv"))
        self.assertEqual(list(saved_df["L"]), [1, 5])

        with self.assertRaises(ValueError):
            tweet_count_sweep(self.dataset, self.config, [0, 5])

    def tearDown(self) -> None:
        shutil.rmtree("to_del", ignore_errors=True)


class TestSweepEmptyTweets(unittest.TestCase):

    @classmethod
    def setUpClass(cls) -> None:
        corpus = synth_corpus(12, signal=1.0, seed=0, tweets_per_user=10)

        # the most recent tweet of the first user is only a link and a mention
        first = corpus.users[0]
        link_only = TweetRecord(text="http://t.co/abc @friend",
                                timestamp=first.tweets[-1].timestamp + timedelta(minutes=5))
        users = [dataclasses.replace(first, tweets=first.tweets + (link_only,))] + corpus.users[1:]

        cls.dataset = prepare_corpus(Corpus(users, name=corpus.name))
        cls.user_id = first.user_id

    def test_latest_tweet_is_empty(self):
        [user] = [user for user in self.dataset.train_users + self.dataset.test_users
                  if user.user_id == self.user_id]

        self.assertEqual(user.token_ids[-1], [])
        self.assertEqual(user.tweet_texts[-1], "http://t.co/abc @friend")

        # the last non-empty tweet takes its place
        self.assertEqual(user.truncated(1).tweet_texts, [user.tweet_texts[-2]])

    def test_sweep(self):
        res_df = tweet_count_sweep(self.dataset, tiny_config(epochs=1), [1, 5])

        self.assertEqual(list(res_df["L"]), [1, 5])
        self.assertFalse(res_df[["accuracy", "f1"]].isna().any().any())


class TestAttributeFusion(unittest.TestCase):
    """
    Half of the depressed users carry their signal in the words of their tweets only, the other half in
    their posting hours and emoji only
    """

    @classmethod
    def setUpClass(cls) -> None:
        dataset = tiny_dataset(n_users=64, seed=2, split_families=True, text_vocab="latent")

        cls.res_df = run_ablations(["MDHAN", "HAN-only", "MM-only"], dataset, tiny_config(epochs=30),
                                   n_workers=3)

    def test_fusion(self):
        f1 = self.res_df["f1"]

        self.assertGreaterEqual(f1["MDHAN"], max(f1["HAN-only"], f1["MM-only"]) - 0.02)

    def test_single_attributes_beat_chance(self):
        for name in ("HAN-only", "MM-only"):
            with self.subTest(configuration=name):
                self.assertGreaterEqual(self.res_df.loc[name, "f1"], 0.5 + 0.15)


class TestModalitySensitivity(unittest.TestCase):
    """
    Depressed users differ only in their posting hours: the Social slice carries all the signal,
    the Topic slice none
    """

    @classmethod
    def setUpClass(cls) -> None:
        dataset = tiny_dataset(n_users=96, seed=1, channels=("social",))

        cls.res_df = run_ablations(["MDHAN", "MDHAN-S", "MDHAN-T"], dataset, tiny_config(epochs=30),
                                   n_workers=3)

    def test_masking_signal_slice(self):
        f1 = self.res_df["f1"]

        self.assertGreaterEqual(f1["MDHAN"] - f1["MDHAN-S"], 0.10)

    def test_masking_signal_free_slice(self):
        f1 = self.res_df["f1"]

        self.assertLess(abs(f1["MDHAN"] - f1["MDHAN-T"]), 0.05)


class TestSweepSignalAccumulation(unittest.TestCase):

    def test_more_tweets_more_signal(self):
        # 30% of the tweets of a depressed user are signal-bearing, in the text only
        dataset = tiny_dataset(n_users=64, signal=0.3, seed=3, channels=("text",), tweets_per_user=50)
        config = tiny_config(epochs=20, use_modalities=False)

        res_df = tweet_count_sweep(dataset, config, [1, 50]).set_index("L")

        self.assertGreaterEqual(res_df.loc[50, "accuracy"], res_df.loc[1, "accuracy"])
        self.assertGreater(res_df.loc[50, "f1"], res_df.loc[1, "f1"])


if __name__ == '__main__':
    unittest.main()
