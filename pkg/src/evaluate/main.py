from __future__ import annotations

import os

import pandas as pd

from src import GeneralParams
from src.data.dataset import BluebirdDataset
from src.evaluate import EvalParams
from src.evaluate.abstract_metric import BluebirdMetric
from src.evaluate.evaluator import Evaluator, create_latex_table
from src.evaluate.experiments import run_ablations, tweet_count_sweep
from src.model import ModelConfig, BluebirdModel
from src.model.models.naive_bayes import NaiveBayes


def eval_main(general_params: GeneralParams,
              model_config: ModelConfig,
              eval_params: EvalParams,
              checkpoint_dir: str) -> dict:

    dataset_obj = BluebirdDataset.load(general_params.phase_dir("dataset"))

    model_cls = BluebirdModel.model_exists(model_config.model_cls_name, return_bool=False)
    model = model_cls.load(checkpoint_dir)

    metric_list = [BluebirdMetric.from_string(metric_str) for metric_str in eval_params.metrics]
    evaluator = Evaluator(model, metric_list, should_log=general_params.log_wandb)

    output_dir = general_params.phase_dir("reports")
    res_dict = evaluator.evaluate_suite(dataset_obj.test_users, output_dir=output_dir)

    if eval_params.create_latex_table and len(metric_list) > 0:
        res_df = pd.DataFrame(res_dict["metrics"], index=pd.Index([model_config.model_cls_name]))

        with open(os.path.join(output_dir, "metrics_latex.tex"), "w") as f:
            f.write(create_latex_table(res_df, title="Test set", index_name="Model"))

    return res_dict


def ablate_main(general_params: GeneralParams, model_config: ModelConfig, eval_params: EvalParams) -> pd.DataFrame:

    dataset_obj = BluebirdDataset.load(general_params.phase_dir("dataset"))

    return run_ablations(list(eval_params.ablations), dataset_obj, model_config,
                         n_workers=eval_params.n_workers,
                         output_dir=general_params.phase_dir("reports"),
                         create_latex=eval_params.create_latex_table)


def sweep_main(general_params: GeneralParams, model_config: ModelConfig, eval_params: EvalParams) -> pd.DataFrame:

    dataset_obj = BluebirdDataset.load(general_params.phase_dir("dataset"))

    return tweet_count_sweep(dataset_obj, model_config, list(eval_params.sweep_l),
                             output_dir=general_params.phase_dir("reports"))


def baseline_nb_main(general_params: GeneralParams, eval_params: EvalParams) -> dict:
    """
    Fits the Naive Bayes baseline on the train users and evaluates it on the test users
    """

    dataset_obj = BluebirdDataset.load(general_params.phase_dir("dataset"))

    model = NaiveBayes().fit(dataset_obj.train_users)
    model.save(general_params.phase_dir("baseline_nb"))

    metric_list = [BluebirdMetric.from_string(metric_str) for metric_str in eval_params.metrics]
    evaluator = Evaluator(model, metric_list, should_log=general_params.log_wandb)

    return evaluator.evaluate_suite(dataset_obj.test_users, output_dir=general_params.phase_dir("baseline_nb"))
