"""Sender model over the address letter-trigrams and the sender name."""

from __future__ import annotations

from typing import Any, Mapping

import numpy as np

from nncore import ops
from nncore.layers import ConvBlock, ConvBlockSpec, Dense, Embedding
from nncore.tensor import Tensor
from preprocessing.encoding import SequenceSpec
from preprocessing.vocabulary import Vocabulary

from .graph import Inputs, ModelGraph, input_lengths

SENDER_WINDOWS = (1, 2, 3)


class SenderModel(ModelGraph):
    """Two embedding branches, one conv block each, then FC 64 and FC 2.

    The FC 64 layer carries an L2 penalty of 0.001 and the output layer
    L1 and L2 penalties of 0.0001. Neither has an activation in between.
    """

    kind = "sender"
    input_names = ("address", "name")

    def __init__(
        self,
        name: str = "sender",
        *,
        trigram_vocab_size: int,
        name_vocab_size: int,
        embedding_dim: int = 64,
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
        self.trigram_vocab_size = trigram_vocab_size
        self.name_vocab_size = name_vocab_size
        self.embedding_dim = embedding_dim
        self.filters = filters
        self.hidden = hidden
        self.dropout = dropout
        self.seed = seed
        rng = np.random.default_rng(seed)
        block = ConvBlockSpec(SENDER_WINDOWS, filters)

        self.address_embedding = self.record(
            Embedding(
                f"{name}.address_embedding",
                trigram_vocab_size,
                embedding_dim,
                rng,
            ),
            inputs=["address"],
        )
        self.name_embedding = self.record(
            Embedding(
                f"{name}.name_embedding", name_vocab_size, embedding_dim, rng
            ),
            inputs=["name"],
        )
        self.address_conv = self.record(
            ConvBlock(
                f"{name}.address_conv",
                block,
                embedding_dim,
                rng,
                sequence_length=lengths.get("address"),
            ),
            input="address",
        )
        self.name_conv = self.record(
            ConvBlock(
                f"{name}.name_conv",
                block,
                embedding_dim,
                rng,
                sequence_length=lengths.get("name"),
            ),
            input="name",
        )
        self.layers.append({"type": "dropout", "rate": dropout})
        self.fc = self.record(
            Dense(f"{name}.fc", 2 * block.output_width, hidden, rng, l2=0.001)
        )
        self.head = self.record(
            Dense(f"{name}.head", hidden, 2, rng, l1=0.0001, l2=0.0001)
        )

    def branch_features(self, inputs: Inputs, *, training: bool) -> Tensor:
        """Concatenated address and name conv features, ``[B, 768]``."""

        address = self.address_conv(
            self.address_embedding(inputs["address"]), training=training
        )
        name = self.name_conv(
            self.name_embedding(inputs["name"]), training=training
        )
        return ops.concat([address, name], axis=-1)

    def logits(
        self,
        inputs: Inputs,
        *,
        training: bool,
        rng: np.random.Generator | None = None,
    ) -> Tensor:
        x = self.branch_features(inputs, training=training)
        x = ops.dropout(x, self.dropout, training=training, rng=rng)
        return self.head(self.fc(x))

    def config(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "trigram_vocab_size": self.trigram_vocab_size,
            "name_vocab_size": self.name_vocab_size,
            "embedding_dim": self.embedding_dim,
            "filters": self.filters,
            "hidden": self.hidden,
            "dropout": self.dropout,
            "seed": self.seed,
        }


def build_sender_model(
    trigrams: Vocabulary,
    names: Vocabulary,
    e: int = 64,
    *,
    dropout: float = 0.6,
    filters: int = 128,
    seed: int = 0,
    spec: SequenceSpec | None = None,
) -> SenderModel:
    return SenderModel(
        "sender",
        trigram_vocab_size=trigrams.size,
        name_vocab_size=names.size,
        embedding_dim=e,
        filters=filters,
        dropout=dropout,
        seed=seed,
        lengths=input_lengths(spec, SenderModel.input_names),
        vocab_hashes={
            "address": trigrams.content_hash,
            "name": names.content_hash,
        },
    )
