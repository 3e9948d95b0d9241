import json
import os
import shutil
import unittest

import numpy as np

from src import GeneralParams
from src.model.main import model_main, gradcheck_main, gradcheck_users
from src.model.models.mdhan import MDHAN
from src.model.models.naive_bayes import NaiveBayes
from tests.synthetic import tiny_dataset, tiny_config


class TestModelMain(unittest.TestCase):

    @classmethod
    def setUpClass(cls) -> None:
        cls.general_params = GeneralParams(exp_name="exp", output_dir="to_del")
        tiny_dataset(n_users=8).save(cls.general_params.phase_dir("dataset"))

    def test_train_mdhan(self):
        model = model_main(self.general_params, tiny_config(epochs=1))

        self.assertIsInstance(model, MDHAN)

        model_dir = self.general_params.phase_dir("model")
        self.assertTrue(os.path.isfile(os.path.join(model_dir, "history.json")))
        self.assertEqual(MDHAN.load(model_dir).config, model.config)

    def test_train_naive_bayes(self):
        model = model_main(self.general_params, tiny_config(model_cls_name="NaiveBayes"))

        self.assertIsInstance(model, NaiveBayes)
        self.assertTrue(os.path.isfile(os.path.join(self.general_params.phase_dir("model"), "naive_bayes.pkl")))

    def test_missing_dataset(self):
        with self.assertRaises(FileNotFoundError):
            model_main(GeneralParams(exp_name="other", output_dir="to_del"), tiny_config())

    @classmethod
    def tearDownClass(cls) -> None:
        shutil.rmtree("to_del", ignore_errors=True)


class TestGradCheckMain(unittest.TestCase):

    def test_gradcheck_users(self):
        config = tiny_config()

        users, embedding_matrix = gradcheck_users(config, seed=0)

        self.assertEqual(len(users), 2)
        self.assertEqual({user.label for user in users}, {0, 1})
        self.assertEqual(embedding_matrix.shape[1], config.embed_dim)
        np.testing.assert_array_equal(embedding_matrix[0], np.zeros(config.embed_dim))
        self.assertTrue(all(len(user.token_ids) == 3 for user in users))

    def test_gradcheck_main(self):
        general_params = GeneralParams(exp_name="exp", output_dir="to_del")

        report = gradcheck_main(general_params, tiny_config(dropout=0.5), seed=0, n_samples=3)

        self.assertTrue(report.passed)
        self.assertLess(report.max_rel_error, 1e-4)

        with open(os.path.join("to_del", "exp", "gradcheck", "gradcheck.json")) as f:
            report_dict = json.load(f)

        self.assertTrue(report_dict["passed"])
        self.assertEqual(report_dict["n_checked"], report.n_checked)

    def tearDown(self) -> None:
        shutil.rmtree("to_del", ignore_errors=True)


if __name__ == '__main__':
    unittest.main()
