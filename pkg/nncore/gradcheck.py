"""Central finite-difference checks for analytic gradients."""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .tensor import Tensor

DEFAULT_STEP = 1e-4


def numerical_gradient(
    loss_fn: Callable[[], float],
    array: np.ndarray,
    *,
    step: float = DEFAULT_STEP,
) -> np.ndarray:
    """Estimate ``d loss / d array`` by perturbing ``array`` in place."""

    grad = np.zeros_like(array)
    flat = array.reshape(-1)
    flat_grad = grad.reshape(-1)
    for i in range(flat.size):
        original = flat[i]
        flat[i] = original + step
        upper = loss_fn()
        flat[i] = original - step
        lower = loss_fn()
        flat[i] = original
        flat_grad[i] = (upper - lower) / (2.0 * step)
    return grad


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    scale = np.linalg.norm(analytic) + np.linalg.norm(numeric)
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(analytic - numeric) / scale)


def check_gradients(
    build_loss: Callable[[], Tensor],
    tensors: Sequence[Tensor],
    *,
    step: float = DEFAULT_STEP,
) -> float:
    """Return the worst relative error over ``tensors``.

    ``build_loss`` must rebuild the scalar loss from the current values of
    ``tensors`` deterministically.
    """

    for tensor in tensors:
        tensor.zero_grad()
    build_loss().backward()
    analytic = [
        tensor.grad.copy()
        if tensor.grad is not None
        else np.zeros_like(tensor.data)
        for tensor in tensors
    ]

    def loss_value() -> float:
        return float(build_loss().data)

    worst = 0.0
    for tensor, grad in zip(tensors, analytic, strict=True):
        numeric = numerical_gradient(loss_value, tensor.data, step=step)
        worst = max(worst, relative_error(grad, numeric))
    return worst
