from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from .metrics import *

from src import ConfigError
from src.evaluate.abstract_metric import BluebirdMetric
from src.evaluate.ablation import AblationConfig


@dataclass
class EvalParams:

    # metric strings, e.g. "f1" (macro averaged) or "f1@positive"
    metrics: tuple[str, ...] = ("accuracy", "precision", "recall", "f1")
    ablations: tuple[str, ...] = tuple(AblationConfig.all_ablations_available(return_str=True))
    sweep_l: tuple[int, ...] = (1, 5, 10, 20, 50, 100, 200)
    n_workers: int = 1
    create_latex_table: bool = True

    @classmethod
    def from_parse(cls, eval_section: dict | None):

        eval_section = dict(eval_section) if eval_section is not None else {}

        valid_keys = {field.name for field in dataclasses.fields(cls)}
        unknown_keys = set(eval_section) - valid_keys
        if unknown_keys:
            raise ConfigError(f"Unknown eval parameters: {sorted(unknown_keys)}")

        for key in ("metrics", "ablations", "sweep_l"):
            if key in eval_section:
                eval_section[key] = tuple(eval_section[key])

        obj = cls(**eval_section)

        try:
            # check that each metric and each ablation exists
            for metric_str in obj.metrics:
                BluebirdMetric.from_string(metric_str)
            for ablation_name in obj.ablations:
                AblationConfig.ablation_exists(ablation_name)
        except KeyError as e:
            raise ConfigError(str(e.args[0])) from None

        if any(n_tweets < 1 for n_tweets in obj.sweep_l):
            raise ConfigError(f"Every sweep L value should be >= 1, got {list(obj.sweep_l)}")
        if obj.n_workers < 1:
            raise ConfigError(f"n_workers should be >= 1, got {obj.n_workers}")

        return obj
