"""Common base for the sub-models and the fused full model."""

from __future__ import annotations

from pathlib import Path
from typing import Any, ClassVar, Mapping, Sequence, TypeVar

import numpy as np

from nncore import ops
from nncore.checkpoint import save_checkpoint
from nncore.layers import Dense, Module, total_penalty
from nncore.tensor import Tensor
from preprocessing.encoding import EncodedBatch, SequenceSpec

Inputs = Mapping[str, np.ndarray]
M = TypeVar("M", bound=Module)


def input_lengths(
    spec: SequenceSpec | None,
    names: Sequence[str],
) -> dict[str, int]:
    if spec is None:
        return {}
    return {name: spec.length(name) for name in names}


class ModelGraph(Module):
    """A two-class model over named index inputs.

    Subclasses build their layers in ``__init__``, record a layer spec list
    in ``self.layers`` and implement :meth:`logits`.
    """

    kind: ClassVar[str] = ""
    input_names: ClassVar[tuple[str, ...]] = ()

    def __init__(
        self,
        name: str,
        *,
        vocab_hashes: Mapping[str, str] | None = None,
    ) -> None:
        super().__init__(name)
        self.layers: list[dict[str, Any]] = []
        self.dense_layers: list[Dense] = []
        self.vocab_hashes = dict(vocab_hashes or {})

    def logits(
        self,
        inputs: Inputs,
        *,
        training: bool,
        rng: np.random.Generator | None = None,
    ) -> Tensor:
        raise NotImplementedError

    def config(self) -> dict[str, Any]:
        """Constructor arguments needed to rebuild this graph."""

        raise NotImplementedError

    def penalty(self) -> Tensor | None:
        return total_penalty(self.dense_layers)

    def loss(
        self,
        inputs: Inputs,
        labels: np.ndarray | Sequence[int],
        *,
        training: bool,
        rng: np.random.Generator | None = None,
    ) -> tuple[Tensor, np.ndarray]:
        logits = self.logits(inputs, training=training, rng=rng)
        penalty = self.penalty() if training else None
        return ops.softmax_cross_entropy(logits, labels, penalty)

    def probabilities(self, inputs: Inputs) -> np.ndarray:
        """Class probabilities ``[B, 2]`` in infer mode."""

        return ops.softmax(self.logits(inputs, training=False).data)

    def record(self, module: M, **extra: Any) -> M:
        """Register ``module`` as a child and append its spec."""

        self.add_child(module)
        self.layers.append({**module.spec(), **extra})
        if isinstance(module, Dense):
            self.dense_layers.append(module)
        return module

    def header(self) -> dict[str, Any]:
        return {
            "model": self.kind,
            "name": self.name,
            "config": self.config(),
            "layers": self.layers,
            "vocab_hashes": dict(sorted(self.vocab_hashes.items())),
        }

    def save(
        self,
        path: Path,
        *,
        metadata: Mapping[str, Any] | None = None,
        manifest: Mapping[str, str] | None = None,
    ) -> str:
        header = self.header()
        header["metadata"] = dict(metadata or {})
        header["manifest"] = dict(manifest or {})
        return save_checkpoint(path, self.parameters(), header)


def predict(model: ModelGraph, batch: EncodedBatch) -> np.ndarray:
    """Probability of the human class per message, in infer mode."""

    batch.check_hashes(
        {
            name: model.vocab_hashes[name]
            for name in model.input_names
            if name in model.vocab_hashes
        }
    )
    missing = [name for name in model.input_names if name not in batch.arrays]
    if missing:
        raise KeyError(f"batch lacks inputs {missing}")
    if len(batch) == 0:
        return np.zeros(0)
    return model.probabilities(batch.arrays)[:, 1]
