from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import pandas as pd
from loguru import logger
from tqdm import tqdm

from src.data.dataset import BluebirdDataset
from src.evaluate.ablation import AblationConfig
from src.evaluate.evaluator import Evaluator, create_latex_table
from src.evaluate.metrics.classification_metrics import MetricsReport
from src.model import ModelConfig
from src.model.models.mdhan import MDHAN
from src.model.trainer import MDHANTrainer

METRIC_COLUMNS = ("accuracy", "precision", "recall", "f1")


def train_and_evaluate(dataset: BluebirdDataset, config: ModelConfig) -> tuple[MetricsReport, list[dict]]:
    """
    Trains a fresh MDHAN with `config` on the train users of `dataset` and evaluates it on the test users
    """

    model = MDHAN.from_config(config, dataset.embedding_matrix)
    history = MDHANTrainer(model).train(dataset.train_users)

    return Evaluator(model).evaluate(dataset.test_users), history


def _report_row(report: MetricsReport) -> dict:
    return {column: getattr(report, column) for column in METRIC_COLUMNS}


def run_ablations(ablation_names: list[str],
                  dataset: BluebirdDataset,
                  config: ModelConfig,
                  n_workers: int = 1,
                  output_dir: str = None,
                  create_latex: bool = False) -> pd.DataFrame:
    """
    One train + evaluate run per ablation configuration, sharing seed and splits. Runs may be spread
    over `n_workers` threads, rows of the resulting table always follow the order of `ablation_names`
    """

    ablations = [AblationConfig.from_string(name) for name in ablation_names]

    names = [ablation.name for ablation in ablations]
    if len(set(names)) != len(names):
        raise ValueError(f"Ablation names should be unique, got {names}")

    print(f"# Running {len(ablations)} ablation configurations with {n_workers} worker(s)\n")

    def run(ablation: AblationConfig) -> MetricsReport:
        report, _ = train_and_evaluate(dataset, ablation.apply(config))
        logger.info(f"{ablation.name}: {report}")
        return report

    with ThreadPoolExecutor(max_workers=n_workers) as executor:
        reports = list(tqdm(executor.map(run, ablations), total=len(ablations), desc="Ablations"))

    res_df = pd.DataFrame([_report_row(report) for report in reports],
                          index=pd.Index(names, name="configuration"))

    if output_dir is not None:
        os.makedirs(output_dir, exist_ok=True)
        res_df.to_csv(os.path.join(output_dir, "ablation.csv"))
        print(f"# CSV Results saved into {os.path.join(output_dir, 'ablation.csv')}!")

        if create_latex:
            with open(os.path.join(output_dir, "ablation_latex.tex"), "w") as f:
                f.write(create_latex_table(res_df, title="Ablation"))

            print(f"# Latex Results saved into {os.path.join(output_dir, 'ablation_latex.tex')}!")

    return res_df


def tweet_count_sweep(dataset: BluebirdDataset,
                      config: ModelConfig,
                      l_values: list[int],
                      output_dir: str = None) -> pd.DataFrame:
    """
    Trains and evaluates the model keeping only the most recent L tweets of each user, for each distinct L
    """

    l_values = sorted(set(l_values))
    if len(l_values) == 0 or l_values[0] < 1:
        raise ValueError(f"L values should be >= 1, got {l_values}")

    max_tweets = max(len(user.token_ids) for user in dataset.train_users + dataset.test_users)
    if l_values[-1] > max_tweets:
        logger.warning(f"L={l_values[-1]} exceeds the maximum number of tweets of a user ({max_tweets})")

    rows = []
    for n_tweets in tqdm(l_values, desc="Tweet count sweep"):
        report, _ = train_and_evaluate(dataset, config.replace(l_max=n_tweets))
        rows.append({"L": n_tweets, **_report_row(report)})

    res_df = pd.DataFrame(rows, columns=["L", *METRIC_COLUMNS])

    if output_dir is not None:
        os.makedirs(output_dir, exist_ok=True)
        res_df.to_csv(os.path.join(output_dir, "sweep.csv"), index=False)
        print(f"# CSV Results saved into {os.path.join(output_dir, 'sweep.csv')}!")

    return res_df
