from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from src.autodiff.tensor import Tensor, ShapeError


@dataclass
class AdamState:
    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0

    # first and second moments, keyed by parameter name
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)


def adam_step(params: dict[str, Tensor], grads: dict[str, np.ndarray], state: AdamState) -> dict[str, Tensor]:
    """
    Bias corrected Adam update, parameter values are updated in place. The step counter advances even
    when every gradient is zero
    """

    for name, param in params.items():
        grad = grads[name]
        if grad.shape != param.shape:
            raise ShapeError(f"Gradient of {name} has shape {grad.shape}, parameter has shape {param.shape}")

    state.step += 1
    bias_correction1 = 1 - state.beta1 ** state.step
    bias_correction2 = 1 - state.beta2 ** state.step

    for name, param in params.items():
        grad = grads[name]

        m = state.m.get(name, np.zeros_like(param.values))
        v = state.v.get(name, np.zeros_like(param.values))

        m = state.beta1 * m + (1 - state.beta1) * grad
        v = state.beta2 * v + (1 - state.beta2) * grad ** 2

        state.m[name] = m
        state.v[name] = v

        m_hat = m / bias_correction1
        v_hat = v / bias_correction2

        param.values -= state.lr * m_hat / (np.sqrt(v_hat) + state.eps)

    return params


class Adam:

    def __init__(self, params: dict[str, Tensor], lr: float = 0.001,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.params = params
        self.state = AdamState(lr=lr, beta1=beta1, beta2=beta2, eps=eps)

    def step(self, grads: dict[str, np.ndarray]):
        adam_step(self.params, grads, self.state)
