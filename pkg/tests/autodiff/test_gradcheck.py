import unittest

import numpy as np

from src.autodiff import Tensor, grad_check
from src.autodiff import tensor as T
from src.autodiff.gradcheck import relative_error
from src.utils import make_rng


class TestGradCheck(unittest.TestCase):

    def test_relative_error(self):
        self.assertEqual(relative_error(1.0, 1.0), 0.0)
        self.assertAlmostEqual(relative_error(2.0, 1.0), 0.5)

        # tiny gradients are compared against the 1e-6 floor
        self.assertAlmostEqual(relative_error(1e-9, 0.0), 1e-3)

    def test_correct_gradients(self):
        rng = make_rng(0)
        params = {"W": Tensor(rng.normal(size=(3, 2)), requires_grad=True),
                  "b": Tensor(np.zeros(2), requires_grad=True)}
        x = rng.normal(size=(4, 3))
        labels = np.array([1.0, 0.0, 1.0, 0.0])

        def closure():
            logits = T.add(T.matmul(x, params["W"]), params["b"])
            y_hat = T.sigmoid(T.sum(T.tanh(logits), axis=1))
            return T.binary_cross_entropy(y_hat, labels)

        report = grad_check(closure, params, n_samples=10, seed=0)

        self.assertTrue(report.passed)
        self.assertTrue(report.deterministic)
        self.assertEqual(report.n_checked, 6 + 2)
        self.assertLess(report.max_rel_error, 1e-4)

        report_dict = report.to_dict()
        self.assertTrue(report_dict["passed"])
        self.assertIsInstance(report_dict["worst_index"], list)

    def test_detects_wrong_gradient(self):
        w = Tensor([1.0, 2.0], requires_grad=True)

        def wrong_square(x):
            # forward is x^2, backward pretends the derivative is x
            def vjp(g):
                return (g * x.values,)
            return T._result(x.values ** 2, (x,), vjp, "wrong_square")

        report = grad_check(lambda: T.sum(wrong_square(w)), {"w": w})

        self.assertFalse(report.passed)
        self.assertAlmostEqual(report.max_rel_error, 0.5, places=4)
        self.assertEqual(report.worst_param, "w")

    def test_non_deterministic(self):
        w = Tensor(make_rng(1).normal(size=50), requires_grad=True)
        rng = make_rng(0)

        report = grad_check(lambda: T.sum(T.dropout(w, 0.5, train=True, rng=rng)), {"w": w})

        self.assertFalse(report.deterministic)
        self.assertFalse(report.passed)


if __name__ == '__main__':
    unittest.main()
