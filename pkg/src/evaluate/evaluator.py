from __future__ import annotations

import os

import numpy as np
import pandas as pd

from src.data.dataset import PreparedUser
from src.evaluate.abstract_metric import BluebirdMetric, ConfusionMatrix
from src.evaluate.metrics.classification_metrics import MetricsReport, metrics
from src.model.abstract_model import BluebirdModel
from src.utils import log_wandb, dump_json


class Evaluator:

    def __init__(self, model: BluebirdModel, metric_list: list[BluebirdMetric] = None, should_log: bool = False):
        self.model = model
        self.metric_list = metric_list if metric_list is not None else []
        self.should_log = should_log

    def confusion(self, users: list[PreparedUser]) -> ConfusionMatrix:
        if len(users) == 0:
            raise ValueError("Can't evaluate on an empty set of users!")

        labels = np.array([user.label for user in users], dtype=int)
        return ConfusionMatrix.from_predictions(self.model.predict(users), labels)

    def evaluate(self, users: list[PreparedUser], average: str = "macro") -> MetricsReport:
        """
        Metrics of the model on `users`, predictions are deterministic with threshold 0.5
        """
        return metrics(self.confusion(users), average=average)

    def evaluate_suite(self, users: list[PreparedUser], output_dir: str = None, split_name: str = "test") -> dict:
        """
        Computes the full report plus every metric of `metric_list`, logs them and (optionally) saves
        them into `output_dir`/metrics.json
        """

        print(f"# Starting evaluation on {len(users)} {split_name} users\n")

        cm = self.confusion(users)
        report = metrics(cm)

        res_dict = {
            "report": report.to_dict(),
            "confusion_matrix": {"tp": cm.tp, "fp": cm.fp, "fn": cm.fn, "tn": cm.tn},
            "metrics": {str(metric): metric(cm) for metric in self.metric_list}
        }

        log_wandb({f"{split_name}/{metric_name}": metric_val
                   for metric_name, metric_val in res_dict["metrics"].items()}, self.should_log)

        print(pd.Series(res_dict["metrics"] if self.metric_list else report.to_dict(), name=split_name))
        print()

        if output_dir is not None:
            dump_json(res_dict, os.path.join(output_dir, "metrics.json"))
            print(f"# Metrics saved into {os.path.join(output_dir, 'metrics.json')}!")

        return res_dict


def create_latex_table(res_df: pd.DataFrame, title: str, index_name: str = "Configuration") -> str:
    """
    Booktabs table with one row per index entry, best value of each column in bold
    """

    n_metrics = len(res_df.columns)

    # preliminary code for the tex file
    latex_code = r"\documentclass{article}" + "\n"
    latex_code += r"\usepackage{booktabs}" + "\n"
    latex_code += r"\begin{document}" + " \n\n"

    # title start
    latex_code += r"\begin{tabular}{c|" + "c" * n_metrics + "}\n\n"
    latex_code += r"\multicolumn{" + str(n_metrics + 1) + r"}{c}{\textbf{" + title + r"}} \\" + "\n"
    latex_code += r"\noalign{\smallskip}" + "\n"
    latex_code += r"\noalign{\smallskip}" + "\n"

    # table start
    latex_code += r"\toprule" + "\n"

    latex_code += r"\multicolumn{1}{c}{" + index_name + "}" + " & "
    latex_code += r"\multicolumn{1}{|c}{" + str(res_df.columns[0]) + "}"
    if n_metrics > 1:
        latex_code += " & " + " & ".join(r"\multicolumn{1}{c}{" + str(metric_name) + "}"
                                         for metric_name in res_df.columns[1:])
    latex_code += r" \\" + "\n"

    latex_code += r"\midrule" + "\n"

    formatted = res_df.map(lambda x: "%.4f" % x)

    # set bold for the configuration which gave the best result for each metric
    for metric_name in res_df.columns:
        best_idx = res_df[metric_name].idxmax()
        formatted.at[best_idx, metric_name] = r"\textbf{" + formatted.loc[best_idx, metric_name] + "}"

    for index, row in formatted.iterrows():
        latex_code += f"{index} & " + " & ".join(row) + r" \\" + "\n"

    latex_code += r"\bottomrule" + "\n\n"
    latex_code += r"\end{tabular}" + "\n\n"
    latex_code += r"\end{document}" + "\n"

    return latex_code
