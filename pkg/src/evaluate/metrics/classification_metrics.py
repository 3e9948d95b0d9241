from __future__ import annotations

from dataclasses import dataclass, asdict

from src.evaluate.abstract_metric import BluebirdMetric, ConfusionMatrix


class Accuracy(BluebirdMetric):

    def per_class(self, cm: ConfusionMatrix) -> float:
        # accuracy is symmetric w.r.t. the two classes, averaging leaves it unchanged
        return self.safe_div(cm.tp + cm.tn, cm.total)

    def __str__(self):
        return self.__class__.__name__


class Precision(BluebirdMetric):

    def per_class(self, cm: ConfusionMatrix) -> float:
        return self.safe_div(cm.tp, cm.tp + cm.fp)


class Recall(BluebirdMetric):

    def per_class(self, cm: ConfusionMatrix) -> float:
        return self.safe_div(cm.tp, cm.tp + cm.fn)


class F1(BluebirdMetric):

    def per_class(self, cm: ConfusionMatrix) -> float:
        precision = Precision(average="positive").per_class(cm)
        recall = Recall(average="positive").per_class(cm)

        return self.safe_div(2 * precision * recall, precision + recall)


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    average: str = "macro"

    def to_dict(self) -> dict:
        return asdict(self)


def metrics(cm: ConfusionMatrix, average: str = "macro") -> MetricsReport:
    """
    Accuracy plus precision, recall and F1 computed for both classes and macro averaged
    (or for the depressed class only with average="positive")
    """

    if cm.total == 0:
        raise ValueError("Can't compute metrics on an empty confusion matrix!")

    return MetricsReport(accuracy=Accuracy()(cm),
                         precision=Precision(average=average)(cm),
                         recall=Recall(average=average)(cm),
                         f1=F1(average=average)(cm),
                         average=average)
