"""Tensors, parameters and the reverse-mode backward pass."""

from __future__ import annotations

from typing import Callable, Iterable, Sequence

import numpy as np

DTYPE = np.float64

BackwardFn = Callable[[np.ndarray], None]


class ShapeError(ValueError):
    """Raised when tensor shapes do not fit the requested operation."""


class Tensor:
    """Dense array with an optional gradient buffer.

    Tensors produced by an operation keep references to their parents and a
    closure that pushes the output gradient back into them. Only tensors that
    depend on a trainable parameter record that history.
    """

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(
        self,
        data: np.ndarray | Sequence[float] | float,
        *,
        requires_grad: bool = False,
        parents: Iterable[Tensor] = (),
        backward: BackwardFn | None = None,
    ) -> None:
        self.data = np.asarray(data, dtype=DTYPE)
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self._parents = tuple(parents)
        self._backward = backward

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"

    def zero_grad(self) -> None:
        self.grad = None

    def accumulate(self, grad: np.ndarray) -> None:
        """Add ``grad`` into the gradient buffer when gradients are tracked."""

        if not self.requires_grad:
            return
        if grad.shape != self.data.shape:
            raise ShapeError(
                f"gradient shape {grad.shape} does not match {self.shape}"
            )
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        self.grad += grad

    def backward(self) -> None:
        """Propagate gradients from this scalar tensor to every ancestor."""

        if self.data.size != 1:
            raise ShapeError("backward() needs a scalar tensor")
        order = _topological_order(self)
        self.grad = np.ones_like(self.data)
        for node in reversed(order):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)


def _topological_order(root: Tensor) -> list[Tensor]:
    order: list[Tensor] = []
    visited: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if id(parent) not in visited:
                stack.append((parent, False))
    return order


def result(
    data: np.ndarray,
    parents: Sequence[Tensor],
    backward: BackwardFn,
) -> Tensor:
    """Wrap an operation output, recording history only when needed."""

    if any(parent.requires_grad for parent in parents):
        return Tensor(
            data,
            requires_grad=True,
            parents=parents,
            backward=backward,
        )
    return Tensor(data)


class Parameter:
    """Named tensor owned by a layer, with its Adam moments.

    Buffers (batch-norm running moments) are parameters that are never
    trainable; they are checkpointed with everything else.
    """

    __slots__ = (
        "name",
        "tensor",
        "buffer",
        "adam_m",
        "adam_v",
        "step_count",
        "_trainable",
    )

    def __init__(
        self,
        name: str,
        data: np.ndarray,
        *,
        trainable: bool = True,
        buffer: bool = False,
    ) -> None:
        self.name = name
        self.buffer = buffer
        self.tensor = Tensor(np.array(data, dtype=DTYPE))
        self.adam_m = np.zeros_like(self.tensor.data)
        self.adam_v = np.zeros_like(self.tensor.data)
        self.step_count = 0
        self._trainable = False
        self.set_trainable(trainable and not buffer)

    def __repr__(self) -> str:
        return (
            f"Parameter({self.name!r}, shape={self.shape}, "
            f"trainable={self.trainable})"
        )

    @property
    def trainable(self) -> bool:
        return self._trainable

    def set_trainable(self, trainable: bool) -> None:
        if self.buffer and trainable:
            raise ValueError(f"buffer {self.name!r} cannot be trainable")
        self._trainable = trainable
        self.tensor.requires_grad = trainable

    @property
    def data(self) -> np.ndarray:
        return self.tensor.data

    @property
    def grad(self) -> np.ndarray | None:
        return self.tensor.grad

    @grad.setter
    def grad(self, value: np.ndarray | None) -> None:
        self.tensor.grad = value

    @property
    def shape(self) -> tuple[int, ...]:
        return self.tensor.shape

    def assign(self, values: np.ndarray) -> None:
        """Overwrite the values in place, keeping shape and identity."""

        array = np.asarray(values, dtype=DTYPE)
        if array.shape != self.shape:
            raise ShapeError(
                f"cannot assign shape {array.shape} to {self.name!r} "
                f"of shape {self.shape}"
            )
        self.tensor.data[...] = array
