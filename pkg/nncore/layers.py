"""Parameter-owning layers built on :mod:`nncore.ops`."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterator, Sequence

import numpy as np

from . import ops
from .tensor import DTYPE, Parameter, ShapeError, Tensor


def glorot_uniform(
    rng: np.random.Generator,
    shape: tuple[int, ...],
    fan_in: int,
    fan_out: int,
) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape).astype(DTYPE)


class Module:
    """Base class holding parameters and child modules in declaration order."""

    def __init__(self, name: str) -> None:
        self.name = name
        self._parameters: list[Parameter] = []
        self._children: list[Module] = []

    def add_parameter(
        self,
        local_name: str,
        data: np.ndarray,
        *,
        buffer: bool = False,
    ) -> Parameter:
        parameter = Parameter(f"{self.name}.{local_name}", data, buffer=buffer)
        self._parameters.append(parameter)
        return parameter

    def add_child(self, module: Module) -> Module:
        self._children.append(module)
        return module

    def parameters(self) -> Iterator[Parameter]:
        yield from self._parameters
        for child in self._children:
            yield from child.parameters()

    def trainable_parameters(self) -> list[Parameter]:
        return [param for param in self.parameters() if param.trainable]

    def zero_grad(self) -> None:
        for param in self.parameters():
            param.grad = None

    def freeze(self) -> None:
        for param in self.parameters():
            if not param.buffer:
                param.set_trainable(False)

    def unfreeze(self) -> None:
        for param in self.parameters():
            if not param.buffer:
                param.set_trainable(True)

    def spec(self) -> dict[str, Any]:
        """Describe the layer without its name or weights."""

        raise NotImplementedError


class Embedding(Module):
    """Lookup table whose padding row starts at zero and never trains."""

    def __init__(
        self,
        name: str,
        vocab_size: int,
        dim: int,
        rng: np.random.Generator,
        *,
        padding_idx: int | None = 0,
    ) -> None:
        super().__init__(name)
        if vocab_size < 1 or dim < 1:
            raise ShapeError("embedding needs positive vocabulary and size")
        table = rng.uniform(-0.05, 0.05, size=(vocab_size, dim)).astype(DTYPE)
        if padding_idx is not None:
            table[padding_idx] = 0.0
        self.padding_idx = padding_idx
        self.table = self.add_parameter("table", table)

    def __call__(self, indices: np.ndarray) -> Tensor:
        return ops.embedding(
            indices, self.table.tensor, padding_idx=self.padding_idx
        )

    def spec(self) -> dict[str, Any]:
        vocab_size, dim = self.table.shape
        return {"type": "embedding", "vocab_size": vocab_size, "dim": dim}


class BatchNorm(Module):
    def __init__(
        self,
        name: str,
        features: int,
        *,
        momentum: float = ops.BN_MOMENTUM,
        epsilon: float = ops.BN_EPSILON,
    ) -> None:
        super().__init__(name)
        self.momentum = momentum
        self.epsilon = epsilon
        self.gamma = self.add_parameter("gamma", np.ones(features))
        self.beta = self.add_parameter("beta", np.zeros(features))
        self.running_mean = self.add_parameter(
            "running_mean", np.zeros(features), buffer=True
        )
        self.running_var = self.add_parameter(
            "running_var", np.ones(features), buffer=True
        )

    def __call__(self, x: Tensor, *, training: bool) -> Tensor:
        return ops.batch_norm(
            x,
            self.gamma.tensor,
            self.beta.tensor,
            self.running_mean.data,
            self.running_var.data,
            training=training,
            momentum=self.momentum,
            epsilon=self.epsilon,
        )

    def spec(self) -> dict[str, Any]:
        return {
            "type": "batch_norm",
            "features": self.gamma.shape[0],
            "momentum": self.momentum,
            "epsilon": self.epsilon,
        }


@dataclass(frozen=True)
class ConvBlockSpec:
    """Window sizes and filters per window of a convolutional block."""

    window_sizes: tuple[int, ...]
    filters_per_window: int
    stride: int = 1

    def __post_init__(self) -> None:
        if not self.window_sizes or min(self.window_sizes) < 1:
            raise ValueError("window sizes must be positive")
        if self.filters_per_window < 1:
            raise ValueError("filters per window must be positive")
        if self.stride != 1:
            raise ValueError("convolutional blocks use stride 1")

    @classmethod
    def up_to(cls, k: int, filters: int) -> ConvBlockSpec:
        """Return the ``[1, 2, ..., k]`` block with ``filters`` each."""

        return cls(tuple(range(1, k + 1)), filters)

    @property
    def output_width(self) -> int:
        return len(self.window_sizes) * self.filters_per_window

    @property
    def max_window(self) -> int:
        return max(self.window_sizes)


class ConvBlock(Module):
    """conv -> batch norm -> ReLU -> max over time, for every window size."""

    def __init__(
        self,
        name: str,
        spec: ConvBlockSpec,
        input_dim: int,
        rng: np.random.Generator,
        *,
        sequence_length: int | None = None,
    ) -> None:
        super().__init__(name)
        if sequence_length is not None and sequence_length < spec.max_window:
            raise ShapeError(
                f"{name}: sequence length {sequence_length} is shorter than "
                f"window {spec.max_window}"
            )
        self.block_spec = spec
        self.input_dim = input_dim
        filters = spec.filters_per_window
        self.windows: list[tuple[Parameter, Parameter, BatchNorm]] = []
        for window in spec.window_sizes:
            weight = self.add_parameter(
                f"w{window}.weight",
                glorot_uniform(
                    rng,
                    (window, input_dim, filters),
                    fan_in=window * input_dim,
                    fan_out=window * filters,
                ),
            )
            bias = self.add_parameter(f"w{window}.bias", np.zeros(filters))
            norm = BatchNorm(f"{name}.w{window}.bn", filters)
            self.add_child(norm)
            self.windows.append((weight, bias, norm))

    def __call__(self, x: Tensor, *, training: bool) -> Tensor:
        pooled = []
        for weight, bias, norm in self.windows:
            convolved = ops.conv1d(x, weight.tensor, bias.tensor)
            activated = ops.relu(norm(convolved, training=training))
            pooled.append(ops.max_over_time(activated))
        return ops.concat(pooled, axis=-1)

    def spec(self) -> dict[str, Any]:
        return {
            "type": "conv_block",
            "window_sizes": list(self.block_spec.window_sizes),
            "filters": self.block_spec.filters_per_window,
            "stride": self.block_spec.stride,
            "input_dim": self.input_dim,
        }


def temporal_conv_forward(
    inputs: Tensor,
    block: ConvBlock,
    *,
    training: bool,
) -> Tensor:
    """Run ``block`` on ``[s, e]`` or ``[B, s, e]`` input.

    Unbatched input yields a ``[k * f]`` vector.
    """

    if inputs.data.ndim == 2:
        batched = ops.reshape(inputs, (1, *inputs.shape))
        return ops.reshape(block(batched, training=training), (-1,))
    return block(inputs, training=training)


class Dense(Module):
    """Fully connected layer with optional L1/L2 weight penalties."""

    def __init__(
        self,
        name: str,
        in_features: int,
        out_features: int,
        rng: np.random.Generator,
        *,
        l1: float = 0.0,
        l2: float = 0.0,
    ) -> None:
        super().__init__(name)
        if l1 < 0 or l2 < 0:
            raise ValueError("penalty parameters must be non-negative")
        self.l1 = l1
        self.l2 = l2
        self.weight = self.add_parameter(
            "weight",
            glorot_uniform(
                rng,
                (in_features, out_features),
                fan_in=in_features,
                fan_out=out_features,
            ),
        )
        self.bias = self.add_parameter("bias", np.zeros(out_features))

    def __call__(self, x: Tensor) -> Tensor:
        return ops.dense(x, self.weight.tensor, self.bias.tensor)

    def penalty(self) -> Tensor | None:
        if self.l1 == 0.0 and self.l2 == 0.0:
            return None
        return ops.weight_penalty(self.weight.tensor, l1=self.l1, l2=self.l2)

    def spec(self) -> dict[str, Any]:
        in_features, out_features = self.weight.shape
        return {
            "type": "dense",
            "in": in_features,
            "out": out_features,
            "l1": self.l1,
            "l2": self.l2,
        }


def total_penalty(layers: Sequence[Dense]) -> Tensor | None:
    """Sum the penalties of layers whose weights are still trainable."""

    terms = [
        penalty
        for layer in layers
        if layer.weight.trainable and (penalty := layer.penalty()) is not None
    ]
    if not terms:
        return None
    return ops.add(*terms)
