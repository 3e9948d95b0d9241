import os
import shutil
import unittest

from src import ConfigError, GeneralParams, ROOT_PATH
from src.yml_parse import load_yml_config, parse_config, parse_yml_config


class TestYmlParse(unittest.TestCase):

    def setUp(self) -> None:
        os.makedirs("to_del", exist_ok=True)

    def _write(self, content: str) -> str:
        path = os.path.join("to_del", "config.yml")
        with open(path, "w") as f:
            f.write(content)

        return path

    def test_empty(self):
        self.assertEqual(load_yml_config(None), {})
        self.assertEqual(load_yml_config(self._write("")), {})

        general_params, data_params, model_params, eval_params = parse_config({})

        self.assertEqual(general_params, GeneralParams())
        self.assertIsNone(data_params)
        self.assertEqual(model_params.model_cls_name, "MDHAN")
        self.assertEqual(eval_params.metrics, ("accuracy", "precision", "recall", "f1"))

    def test_repo_params(self):
        general_params, data_params, model_params, eval_params = parse_yml_config(os.path.join(ROOT_PATH, "params.yml"))

        self.assertEqual(general_params.exp_name, "synth_signal")
        self.assertEqual(data_params.synth.n_users, 64)
        self.assertEqual(data_params.lda.K, 25)
        self.assertEqual(model_params.hidden, 100)
        self.assertIn("f1@positive", eval_params.metrics)

    def test_sections(self):
        path = self._write("exp_name: test\n"
                           "data:\n"
                           "  corpus_path: corpus.jsonl\n"
                           "model:\n"
                           "  hidden: 10\n"
                           "eval:\n"
                           "  n_workers: 3\n")

        general_params, data_params, model_params, eval_params = parse_yml_config(path)

        self.assertEqual(general_params.exp_name, "test")
        self.assertEqual(data_params.corpus_path, "corpus.jsonl")
        self.assertEqual(model_params.hidden, 10)
        self.assertEqual(eval_params.n_workers, 3)

    def test_errors(self):
        with self.assertRaises(FileNotFoundError):
            load_yml_config(os.path.join("to_del", "missing.yml"))

        with self.assertRaises(ConfigError):
            load_yml_config(self._write("exp_name: [unclosed\n"))

        with self.assertRaises(ConfigError):
            load_yml_config(self._write("- a\n- b\n"))

        with self.assertRaises(ConfigError):
            parse_config({"unknown": 1})

        with self.assertRaises(ConfigError):
            parse_config({"model": {"hidden": 0}})

        with self.assertRaises(ConfigError):
            parse_config({"data": {"min_posts": 5}})

    def tearDown(self) -> None:
        shutil.rmtree("to_del", ignore_errors=True)


if __name__ == '__main__':
    unittest.main()
