from __future__ import annotations

import inspect
from abc import abstractmethod, ABC
from dataclasses import dataclass

import numpy as np
from requests.structures import CaseInsensitiveDict

AVERAGES = ("macro", "positive")


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError(f"Confusion matrix counts should be >= 0, got {self}")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @classmethod
    def from_predictions(cls, predictions: np.ndarray, labels: np.ndarray) -> ConfusionMatrix:
        predictions = np.asarray(predictions, dtype=int)
        labels = np.asarray(labels, dtype=int)

        if predictions.shape != labels.shape:
            raise ValueError(f"Predictions {predictions.shape} and labels {labels.shape} should have the same shape")

        return cls(tp=int(np.sum((predictions == 1) & (labels == 1))),
                   fp=int(np.sum((predictions == 1) & (labels == 0))),
                   fn=int(np.sum((predictions == 0) & (labels == 1))),
                   tn=int(np.sum((predictions == 0) & (labels == 0))))

    def swapped(self) -> ConfusionMatrix:
        # same matrix seen from the negative class
        return ConfusionMatrix(tp=self.tn, fp=self.fn, fn=self.fp, tn=self.tp)


class BluebirdMetric(ABC):
    # name - class mapping, used for when metrics should be initialized from strings
    str_alias_cls: dict[str, type[BluebirdMetric]] = CaseInsensitiveDict()

    # automatically called on subclass definition, will populate the str_alias_cls dict
    def __init_subclass__(cls, **kwargs):

        if not inspect.isabstract(cls):
            cls.str_alias_cls[cls.__name__] = cls

        super().__init_subclass__(**kwargs)

    def __init__(self, average: str = "macro"):
        if average not in AVERAGES:
            raise ValueError(f"Averaging mode should be one of {AVERAGES}, got {average}")

        self.average = average

    @staticmethod
    def safe_div(num: float, den: float) -> float:
        # 0 whenever the denominator is 0 (e.g. precision of a class never predicted)
        return num / den if den != 0 else 0.0

    @abstractmethod
    def per_class(self, cm: ConfusionMatrix) -> float:
        """Value of the metric for the positive class of `cm`"""
        raise NotImplementedError

    def __call__(self, cm: ConfusionMatrix) -> float:
        if cm.total == 0:
            raise ValueError("Can't compute metrics on an empty confusion matrix!")

        if self.average == "positive":
            return self.per_class(cm)

        return (self.per_class(cm) + self.per_class(cm.swapped())) / 2

    @classmethod
    def from_string(cls, metric_str: str) -> BluebirdMetric:

        try:
            metric_info = metric_str.split("@")

            match metric_info:

                case [metric_name]:
                    instantiated_metric = cls.str_alias_cls[metric_name]()

                case [metric_name, average]:
                    if average.lower() not in AVERAGES:
                        raise KeyError

                    instantiated_metric = cls.str_alias_cls[metric_name](average=average.lower())

                case _:
                    raise KeyError

        except KeyError:
            raise KeyError(f"{metric_str} metric does not exist!") from None

        return instantiated_metric

    @classmethod
    def all_metrics_available(cls, return_str: bool = False) -> list[type[BluebirdMetric] | str]:
        return list(cls.str_alias_cls.keys()) if return_str else list(cls.str_alias_cls.values())

    @classmethod
    def metric_exists(cls, metric_cls_name: str, return_bool: bool = True) -> bool | type[BluebirdMetric]:

        # regardless of the averaging mode, we are only interested in the metric name
        # which is the part before the optional '@' symbol
        metric_cls_name = metric_cls_name.split("@")[0]

        try:
            metric_cls = cls.str_alias_cls[metric_cls_name]
        except KeyError:
            raise KeyError(f"Metric {metric_cls_name} does not exist!") from None

        # if we arrive at the return clause, metric_cls exists that's why we return True directly
        return metric_cls if not return_bool else True

    def __eq__(self, other):
        return type(self) is type(other) and self.average == other.average

    def __hash__(self):
        return hash((type(self), self.average))

    def __repr__(self):
        return str(self)

    def __str__(self):
        string = self.__class__.__name__
        if self.average != "macro":
            string += f"@{self.average}"

        return string
