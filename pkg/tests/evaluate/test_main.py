import json
import os
import shutil
import unittest

from src import GeneralParams, ConfigError
from src.evaluate import EvalParams
from src.evaluate.main import eval_main, baseline_nb_main, ablate_main, sweep_main
from src.model.main import model_main
from tests.synthetic import tiny_dataset, tiny_config


class TestEvalParams(unittest.TestCase):

    def test_defaults(self):
        eval_params = EvalParams.from_parse(None)

        self.assertEqual(eval_params.metrics, ("accuracy", "precision", "recall", "f1"))
        self.assertEqual(len(eval_params.ablations), 11)
        self.assertEqual(eval_params.sweep_l, (1, 5, 10, 20, 50, 100, 200))

    def test_from_parse(self):
        eval_params = EvalParams.from_parse({"metrics": ["f1@positive"], "sweep_l": [2, 3], "n_workers": 4})

        self.assertEqual(eval_params.metrics, ("f1@positive",))
        self.assertEqual(eval_params.sweep_l, (2, 3))
        self.assertEqual(eval_params.n_workers, 4)

    def test_errors(self):
        wrong_sections = [{"unknown": 1},
                          {"metrics": ["auc"]},
                          {"metrics": ["f1@micro"]},
                          {"ablations": ["MDHAN-X"]},
                          {"sweep_l": [0]},
                          {"n_workers": 0}]

        for wrong_section in wrong_sections:
            with self.assertRaises(ConfigError):
                EvalParams.from_parse(wrong_section)


class TestEvalMain(unittest.TestCase):

    @classmethod
    def setUpClass(cls) -> None:
        cls.general_params = GeneralParams(exp_name="exp", output_dir="to_del")
        cls.model_config = tiny_config(epochs=1)
        cls.eval_params = EvalParams(metrics=("accuracy", "f1@positive"), ablations=("MDHAN", "MM-only"),
                                     sweep_l=(1, 3))

        tiny_dataset(n_users=12).save(cls.general_params.phase_dir("dataset"))
        model_main(cls.general_params, cls.model_config)

    def test_eval_main(self):
        res_dict = eval_main(self.general_params, self.model_config, self.eval_params,
                             checkpoint_dir=self.general_params.phase_dir("model"))

        self.assertEqual(set(res_dict["metrics"]), {"Accuracy", "F1@positive"})

        reports_dir = self.general_params.phase_dir("reports")
        with open(os.path.join(reports_dir, "metrics.json")) as f:
            self.assertEqual(json.load(f)["confusion_matrix"], res_dict["confusion_matrix"])

        self.assertTrue(os.path.isfile(os.path.join(reports_dir, "metrics_latex.tex")))

    def test_baseline_nb_main(self):
        res_dict = baseline_nb_main(self.general_params, self.eval_params)

        baseline_dir = self.general_params.phase_dir("baseline_nb")
        self.assertTrue(os.path.isfile(os.path.join(baseline_dir, "naive_bayes.pkl")))
        self.assertTrue(os.path.isfile(os.path.join(baseline_dir, "metrics.json")))
        self.assertEqual(sum(res_dict["confusion_matrix"].values()), 6)

    def test_ablate_main(self):
        res_df = ablate_main(self.general_params, self.model_config, self.eval_params)

        self.assertEqual(list(res_df.index), ["MDHAN", "MM-only"])
        self.assertTrue(os.path.isfile(os.path.join(self.general_params.phase_dir("reports"), "ablation.csv")))

    def test_sweep_main(self):
        res_df = sweep_main(self.general_params, self.model_config, self.eval_params)

        self.assertEqual(list(res_df["L"]), [1, 3])

    def test_missing_checkpoint(self):
        with self.assertRaises(FileNotFoundError):
            eval_main(self.general_params, self.model_config, self.eval_params, checkpoint_dir="to_del/missing")

    @classmethod
    def tearDownClass(cls) -> None:
        shutil.rmtree("to_del", ignore_errors=True)


if __name__ == '__main__':
    unittest.main()
