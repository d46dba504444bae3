"""Adam optimizer over :class:`Parameter` objects."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .tensor import Parameter

DEFAULT_LEARNING_RATE = 1e-3
DEFAULT_BETA1 = 0.9
DEFAULT_BETA2 = 0.999
DEFAULT_EPSILON = 1e-8


def adam_step(
    params: Iterable[Parameter],
    *,
    lr: float = DEFAULT_LEARNING_RATE,
    beta1: float = DEFAULT_BETA1,
    beta2: float = DEFAULT_BETA2,
    epsilon: float = DEFAULT_EPSILON,
) -> None:
    """Apply one bias-corrected Adam update to the trainable parameters.

    Frozen parameters and buffers are skipped without touching their data
    or moments.
    """

    trainable = [param for param in params if param.trainable]
    missing = [param.name for param in trainable if param.grad is None]
    if missing:
        raise ValueError(f"missing gradient for {', '.join(missing)}")
    for param in trainable:
        grad = param.grad
        param.step_count += 1
        step = param.step_count
        param.adam_m *= beta1
        param.adam_m += (1.0 - beta1) * grad
        param.adam_v *= beta2
        param.adam_v += (1.0 - beta2) * np.square(grad)
        m_hat = param.adam_m / (1.0 - beta1**step)
        v_hat = param.adam_v / (1.0 - beta2**step)
        param.data[...] -= lr * m_hat / (np.sqrt(v_hat) + epsilon)


@dataclass
class Adam:
    params: list[Parameter]
    lr: float = DEFAULT_LEARNING_RATE
    beta1: float = DEFAULT_BETA1
    beta2: float = DEFAULT_BETA2
    epsilon: float = DEFAULT_EPSILON

    def zero_grad(self) -> None:
        for param in self.params:
            param.grad = None

    def step(self) -> None:
        adam_step(
            self.params,
            lr=self.lr,
            beta1=self.beta1,
            beta2=self.beta2,
            epsilon=self.epsilon,
        )
