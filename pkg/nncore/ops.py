"""Differentiable operations used by the convolutional text models.

Every function takes and returns :class:`Tensor` objects and installs the
matching gradient closure on its output. Only this fixed set of operations
is supported; there is no general expression graph.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .tensor import DTYPE, ShapeError, Tensor, result

BN_EPSILON = 1e-5
BN_MOMENTUM = 0.99


def embedding(
    indices: np.ndarray | Sequence[int],
    table: Tensor,
    *,
    padding_idx: int | None = None,
) -> Tensor:
    """Look up rows of ``table``; output shape is ``indices.shape + (e,)``."""

    idx = np.asarray(indices)
    if idx.size and not np.issubdtype(idx.dtype, np.integer):
        raise ShapeError("embedding indices must be integers")
    idx = idx.astype(np.int64, copy=False)
    vocab_size, dim = table.shape
    bad = np.argwhere((idx < 0) | (idx >= vocab_size))
    if bad.size:
        position = tuple(int(i) for i in bad[0])
        raise IndexError(
            f"embedding index {int(idx[position])} at position {position} "
            f"is outside [0, {vocab_size})"
        )

    def backward(grad: np.ndarray) -> None:
        table_grad = np.zeros_like(table.data)
        np.add.at(table_grad, idx.reshape(-1), grad.reshape(-1, dim))
        if padding_idx is not None:
            table_grad[padding_idx] = 0.0
        table.accumulate(table_grad)

    return result(table.data[idx], (table,), backward)


def conv1d(x: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    """Stride-1 temporal convolution.

    ``x`` is ``[B, s, e]``, ``weight`` is ``[w, e, f]`` and the output is
    ``[B, s - w + 1, f]``.
    """

    if x.data.ndim != 3:
        raise ShapeError(f"conv1d expects [B, s, e] input, got {x.shape}")
    batch, length, dim = x.shape
    window, weight_dim, filters = weight.shape
    if weight_dim != dim:
        raise ShapeError(
            f"conv1d weight expects embedding size {weight_dim}, got {dim}"
        )
    if length < window:
        raise ShapeError(
            f"sequence length {length} is shorter than window {window}"
        )
    positions = length - window + 1
    out = np.empty((batch, positions, filters), dtype=DTYPE)
    out[...] = bias.data
    for offset in range(window):
        out += x.data[:, offset : offset + positions, :] @ weight.data[offset]

    def backward(grad: np.ndarray) -> None:
        if x.requires_grad:
            x_grad = np.zeros_like(x.data)
            for offset in range(window):
                x_grad[:, offset : offset + positions, :] += (
                    grad @ weight.data[offset].T
                )
            x.accumulate(x_grad)
        if weight.requires_grad:
            weight_grad = np.empty_like(weight.data)
            for offset in range(window):
                weight_grad[offset] = np.tensordot(
                    x.data[:, offset : offset + positions, :],
                    grad,
                    axes=([0, 1], [0, 1]),
                )
            weight.accumulate(weight_grad)
        bias.accumulate(grad.sum(axis=(0, 1)))

    return result(out, (x, weight, bias), backward)


def batch_norm(
    x: Tensor,
    gamma: Tensor,
    beta: Tensor,
    running_mean: np.ndarray,
    running_var: np.ndarray,
    *,
    training: bool,
    momentum: float = BN_MOMENTUM,
    epsilon: float = BN_EPSILON,
) -> Tensor:
    """Normalize the last axis using statistics over all leading axes.

    Train mode uses batch statistics and updates the running moments in
    place; infer mode reads the running moments only.
    """

    features = x.shape[-1]
    if gamma.shape != (features,) or beta.shape != (features,):
        raise ShapeError(
            f"batch norm expects {features} features, "
            f"got gamma {gamma.shape} and beta {beta.shape}"
        )
    axes = tuple(range(x.data.ndim - 1))
    if training:
        if x.shape[0] < 2:
            raise ShapeError("batch norm in train mode needs batch size >= 2")
        mean = x.data.mean(axis=axes)
        var = x.data.var(axis=axes)
        running_mean *= momentum
        running_mean += (1.0 - momentum) * mean
        running_var *= momentum
        running_var += (1.0 - momentum) * var
    else:
        mean = running_mean
        var = running_var
    inv_std = 1.0 / np.sqrt(var + epsilon)
    normalized = (x.data - mean) * inv_std
    out = gamma.data * normalized + beta.data
    count = x.data.size // features

    def backward(grad: np.ndarray) -> None:
        gamma.accumulate((grad * normalized).sum(axis=axes))
        beta.accumulate(grad.sum(axis=axes))
        if not x.requires_grad:
            return
        grad_norm = grad * gamma.data
        if not training:
            x.accumulate(grad_norm * inv_std)
            return
        x.accumulate(
            inv_std
            / count
            * (
                count * grad_norm
                - grad_norm.sum(axis=axes)
                - normalized * (grad_norm * normalized).sum(axis=axes)
            )
        )

    return result(out, (x, gamma, beta), backward)


def relu(x: Tensor) -> Tensor:
    mask = x.data > 0

    def backward(grad: np.ndarray) -> None:
        x.accumulate(grad * mask)

    return result(x.data * mask, (x,), backward)


def max_over_time(x: Tensor) -> Tensor:
    """Max-pool ``[B, L, f]`` over the position axis into ``[B, f]``."""

    if x.data.ndim != 3:
        raise ShapeError(f"max_over_time expects [B, L, f], got {x.shape}")
    winners = x.data.argmax(axis=1)[:, None, :]
    out = np.take_along_axis(x.data, winners, axis=1)[:, 0, :]

    def backward(grad: np.ndarray) -> None:
        x_grad = np.zeros_like(x.data)
        np.put_along_axis(x_grad, winners, grad[:, None, :], axis=1)
        x.accumulate(x_grad)

    return result(out, (x,), backward)


def concat(tensors: Sequence[Tensor], axis: int = -1) -> Tensor:
    if not tensors:
        raise ShapeError("concat needs at least one tensor")
    out = np.concatenate([tensor.data for tensor in tensors], axis=axis)
    splits = np.cumsum([tensor.shape[axis] for tensor in tensors])[:-1]

    def backward(grad: np.ndarray) -> None:
        for tensor, piece in zip(
            tensors, np.split(grad, splits, axis=axis), strict=True
        ):
            tensor.accumulate(piece)

    return result(out, tuple(tensors), backward)


def reshape(x: Tensor, shape: tuple[int, ...]) -> Tensor:
    original = x.shape

    def backward(grad: np.ndarray) -> None:
        x.accumulate(grad.reshape(original))

    return result(x.data.reshape(shape), (x,), backward)


def dense(x: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    """Affine map ``x @ weight + bias`` for ``x`` of shape ``[B, in]``."""

    if x.data.ndim != 2 or x.shape[1] != weight.shape[0]:
        raise ShapeError(
            f"dense input {x.shape} does not match weight {weight.shape}"
        )
    if bias.shape != (weight.shape[1],):
        raise ShapeError(
            f"dense bias {bias.shape} does not match weight {weight.shape}"
        )
    out = x.data @ weight.data + bias.data

    def backward(grad: np.ndarray) -> None:
        if x.requires_grad:
            x.accumulate(grad @ weight.data.T)
        if weight.requires_grad:
            weight.accumulate(x.data.T @ grad)
        bias.accumulate(grad.sum(axis=0))

    return result(out, (x, weight, bias), backward)


def weight_penalty(weight: Tensor, *, l1: float, l2: float) -> Tensor:
    """Return ``l1 * sum|w| + l2 * sum(w^2)`` as a scalar tensor."""

    value = l1 * np.abs(weight.data).sum() + l2 * np.square(weight.data).sum()

    def backward(grad: np.ndarray) -> None:
        weight.accumulate(
            grad * (l1 * np.sign(weight.data) + 2.0 * l2 * weight.data)
        )

    return result(np.asarray(value), (weight,), backward)


def add(*terms: Tensor) -> Tensor:
    """Sum scalar tensors."""

    value = np.asarray(sum(float(term.data) for term in terms))

    def backward(grad: np.ndarray) -> None:
        for term in terms:
            term.accumulate(np.broadcast_to(grad, term.shape).copy())

    return result(value, terms, backward)


def dropout(
    x: Tensor,
    rate: float,
    *,
    training: bool,
    rng: np.random.Generator | None = None,
) -> Tensor:
    """Inverted dropout; the identity outside training."""

    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
    if not training or rate == 0.0:
        return x
    if rng is None:
        raise ValueError("dropout in train mode needs a random generator")
    mask = (rng.random(x.shape) >= rate) / (1.0 - rate)

    def backward(grad: np.ndarray) -> None:
        x.accumulate(grad * mask)

    return result(x.data * mask, (x,), backward)


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


def softmax_cross_entropy(
    logits: Tensor,
    labels: np.ndarray | Sequence[int],
    penalty: Tensor | None = None,
) -> tuple[Tensor, np.ndarray]:
    """Mean negative log-likelihood plus an optional penalty term.

    Returns the scalar loss tensor and the row-normalized probabilities.
    """

    if not np.all(np.isfinite(logits.data)):
        raise ValueError("softmax_cross_entropy received non-finite logits")
    targets = np.asarray(labels, dtype=np.int64)
    batch, classes = logits.shape
    if targets.shape != (batch,):
        raise ShapeError(
            f"expected {batch} labels, got array of shape {targets.shape}"
        )
    if np.any((targets < 0) | (targets >= classes)):
        raise ValueError(f"labels must lie in [0, {classes})")
    shifted = logits.data - logits.data.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    probabilities = np.exp(log_probs)
    rows = np.arange(batch)
    nll = -log_probs[rows, targets].mean()

    def backward(grad: np.ndarray) -> None:
        logits_grad = probabilities.copy()
        logits_grad[rows, targets] -= 1.0
        logits.accumulate(logits_grad * (float(grad) / batch))

    loss = result(np.asarray(nll), (logits,), backward)
    if penalty is not None:
        loss = add(loss, penalty)
    return loss, probabilities
