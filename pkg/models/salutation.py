"""Salutation model over the opening words of the body."""

from __future__ import annotations

from typing import Any, Mapping

import numpy as np

from nncore import ops
from nncore.layers import ConvBlock, ConvBlockSpec, Dense, Embedding
from nncore.tensor import Tensor
from preprocessing.encoding import SequenceSpec
from preprocessing.vocabulary import Vocabulary

from .graph import Inputs, ModelGraph, input_lengths

SALUTATION_WINDOWS = (1, 2, 3)


class SalutationModel(ModelGraph):
    kind = "salutation"
    input_names = ("salutation",)

    def __init__(
        self,
        name: str = "salutation",
        *,
        vocab_size: int,
        embedding_dim: int = 128,
        filters: int = 128,
        hidden: int = 64,
        dropout: float = 0.6,
        seed: int = 0,
        vocab_hashes: Mapping[str, str] | None = None,
        lengths: Mapping[str, int] | None = None,
    ) -> None:
        super().__init__(name, vocab_hashes=vocab_hashes)
        lengths = lengths or {}
        if not 0.0 <= dropout < 1.0:
            raise ValueError(f"dropout rate must be in [0, 1), got {dropout}")
        self.vocab_size = vocab_size
        self.embedding_dim = embedding_dim
        self.filters = filters
        self.hidden = hidden
        self.dropout = dropout
        self.seed = seed
        rng = np.random.default_rng(seed)
        block = ConvBlockSpec(SALUTATION_WINDOWS, filters)

        self.embedding = self.record(
            Embedding(f"{name}.embedding", vocab_size, embedding_dim, rng),
            inputs=["salutation"],
        )
        self.conv = self.record(
            ConvBlock(
                f"{name}.conv",
                block,
                embedding_dim,
                rng,
                sequence_length=lengths.get("salutation"),
            ),
            input="salutation",
        )
        self.layers.append({"type": "dropout", "rate": dropout})
        self.fc = self.record(
            Dense(f"{name}.fc", block.output_width, hidden, rng)
        )
        self.head = self.record(Dense(f"{name}.head", hidden, 2, rng))

    @property
    def representation_width(self) -> int:
        return self.hidden

    def representation(
        self,
        inputs: Inputs,
        *,
        training: bool,
        rng: np.random.Generator | None = None,
    ) -> Tensor:
        """Post-ReLU output of the 64-unit layer."""

        x = self.conv(self.embedding(inputs["salutation"]), training=training)
        x = ops.dropout(x, self.dropout, training=training, rng=rng)
        return ops.relu(self.fc(x))

    def logits(
        self,
        inputs: Inputs,
        *,
        training: bool,
        rng: np.random.Generator | None = None,
    ) -> Tensor:
        x = self.representation(inputs, training=training, rng=rng)
        return self.head(x)

    def config(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "vocab_size": self.vocab_size,
            "embedding_dim": self.embedding_dim,
            "filters": self.filters,
            "hidden": self.hidden,
            "dropout": self.dropout,
            "seed": self.seed,
        }


def build_salutation_model(
    vocab: Vocabulary,
    e: int = 128,
    *,
    dropout: float = 0.6,
    filters: int = 128,
    seed: int = 0,
    spec: SequenceSpec | None = None,
) -> SalutationModel:
    return SalutationModel(
        "salutation",
        vocab_size=vocab.size,
        embedding_dim=e,
        filters=filters,
        dropout=dropout,
        seed=seed,
        lengths=input_lengths(spec, SalutationModel.input_names),
        vocab_hashes={"salutation": vocab.content_hash},
    )
