import unittest

from src.evaluate.abstract_metric import ConfusionMatrix
from src.evaluate.metrics.classification_metrics import Accuracy, Precision, Recall, F1, MetricsReport, metrics


class TestClassificationMetrics(unittest.TestCase):

    def setUp(self) -> None:
        self.cm = ConfusionMatrix(tp=8, fp=2, fn=1, tn=9)

    def test_positive_class(self):
        self.assertAlmostEqual(Accuracy()(self.cm), 0.85)
        self.assertAlmostEqual(Precision(average="positive")(self.cm), 0.8)
        self.assertAlmostEqual(Recall(average="positive")(self.cm), 8 / 9)
        self.assertAlmostEqual(F1(average="positive")(self.cm), 0.842105, places=6)

    def test_macro(self):
        self.assertAlmostEqual(Precision()(self.cm), (8 / 10 + 9 / 10) / 2)
        self.assertAlmostEqual(Recall()(self.cm), (8 / 9 + 9 / 11) / 2)
        self.assertAlmostEqual(F1()(self.cm), (16 / 19 + 18 / 21) / 2)

        # accuracy doesn't depend on the averaging mode
        self.assertAlmostEqual(Accuracy(average="positive")(self.cm), Accuracy()(self.cm))

    def test_degenerate(self):
        # the positive class is never predicted
        cm = ConfusionMatrix(tp=0, fp=0, fn=5, tn=5)

        self.assertEqual(Precision(average="positive")(cm), 0.0)
        self.assertEqual(Recall(average="positive")(cm), 0.0)
        self.assertEqual(F1(average="positive")(cm), 0.0)
        self.assertAlmostEqual(Accuracy()(cm), 0.5)

        perfect = ConfusionMatrix(tp=3, fp=0, fn=0, tn=4)
        self.assertEqual(metrics(perfect), MetricsReport(1.0, 1.0, 1.0, 1.0))

    def test_metrics_report(self):
        report = metrics(self.cm, average="positive")

        self.assertEqual(report.average, "positive")
        self.assertAlmostEqual(report.accuracy, 0.85)
        self.assertAlmostEqual(report.f1, 16 / 19)

        report_dict = report.to_dict()
        self.assertEqual(set(report_dict), {"accuracy", "precision", "recall", "f1", "average"})

        with self.assertRaises(ValueError):
            metrics(ConfusionMatrix(0, 0, 0, 0))


if __name__ == '__main__':
    unittest.main()
