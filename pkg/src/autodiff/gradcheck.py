from __future__ import annotations

from dataclasses import dataclass, asdict
from typing import Callable

import numpy as np

from src.autodiff.tensor import Tensor, Tape
from src.utils import make_rng


@dataclass
class GradCheckReport:
    max_rel_error: float
    n_checked: int
    deterministic: bool
    worst_param: str | None
    worst_index: tuple[int, ...] | None
    h: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.deterministic and self.max_rel_error < self.tol

    def to_dict(self) -> dict:
        report_dict = asdict(self)
        report_dict["worst_index"] = list(self.worst_index) if self.worst_index is not None else None
        report_dict["passed"] = self.passed
        return report_dict


def relative_error(analytic: float, numeric: float) -> float:
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-6)


def grad_check(closure: Callable[[], Tensor],
               params: dict[str, Tensor],
               h: float = 1e-5,
               tol: float = 1e-4,
               n_samples: int = 10,
               seed: int = 0) -> GradCheckReport:
    """
    Compares the gradients computed by the tape with central finite differences on at most `n_samples`
    randomly sampled coordinates of each parameter. The closure is evaluated twice with the same
    parameters first: if the two losses differ (e.g. dropout left enabled) the report is flagged as
    non deterministic
    """

    with Tape() as tape:
        loss = closure()
    analytic_grads = dict(zip(params, tape.backward(loss, list(params.values()))))

    deterministic = closure().item() == closure().item() == loss.item()

    rng = make_rng(seed)

    max_error = 0.0
    n_checked = 0
    worst_param = None
    worst_index = None
    for name, param in params.items():

        n_coords = min(n_samples, param.size)
        flat_indices = rng.choice(param.size, size=n_coords, replace=False)

        for flat_idx in np.sort(flat_indices):
            index = np.unravel_index(flat_idx, param.shape)
            original = param.values[index]

            param.values[index] = original + h
            loss_plus = closure().item()
            param.values[index] = original - h
            loss_minus = closure().item()
            param.values[index] = original

            numeric = (loss_plus - loss_minus) / (2 * h)
            error = relative_error(float(analytic_grads[name][index]), numeric)
            n_checked += 1

            if error > max_error or worst_param is None:
                max_error = max(error, max_error)
                worst_param = name
                worst_index = tuple(int(i) for i in index)

    return GradCheckReport(max_rel_error=max_error,
                           n_checked=n_checked,
                           deterministic=deterministic,
                           worst_param=worst_param,
                           worst_index=worst_index,
                           h=h,
                           tol=tol)
