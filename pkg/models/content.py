"""Content model (subject + body) and the action model sharing its shape."""

from __future__ import annotations

from typing import Any, Mapping

import numpy as np

from nncore import ops
from nncore.layers import BatchNorm, ConvBlock, ConvBlockSpec, Dense, Embedding
from nncore.tensor import Parameter, Tensor
from preprocessing.encoding import SequenceSpec
from preprocessing.vocabulary import Vocabulary

from .graph import Inputs, ModelGraph, input_lengths


class ContentModel(ModelGraph):
    """Shared word embedding, one conv block per input, two FC-BN-ReLU
    blocks and a two-unit head.

    The output of the second FC-BN-ReLU block is the 128-unit
    representation consumed by the full model.
    """

    kind = "content"
    input_names = ("subject", "content")

    def __init__(
        self,
        name: str = "content",
        *,
        vocab_size: int,
        embedding_dim: int = 64,
        windows: int = 4,
        filters: int = 128,
        hidden: int = 128,
        dropout: float = 0.4,
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
        self.windows = windows
        self.filters = filters
        self.hidden = hidden
        self.dropout = dropout
        self.seed = seed
        rng = np.random.default_rng(seed)
        block = ConvBlockSpec.up_to(windows, filters)

        self.embedding = self.record(
            Embedding(f"{name}.embedding", vocab_size, embedding_dim, rng),
            inputs=["subject", "content"],
        )
        self.subject_conv = self.record(
            ConvBlock(
                f"{name}.subject_conv",
                block,
                embedding_dim,
                rng,
                sequence_length=lengths.get("subject"),
            ),
            input="subject",
        )
        self.content_conv = self.record(
            ConvBlock(
                f"{name}.content_conv",
                block,
                embedding_dim,
                rng,
                sequence_length=lengths.get("content"),
            ),
            input="content",
        )
        self.layers.append({"type": "dropout", "rate": dropout})
        merged = 2 * block.output_width
        self.fc1 = self.record(Dense(f"{name}.fc1", merged, hidden, rng))
        self.bn1 = self.record(BatchNorm(f"{name}.bn1", hidden))
        self.fc2 = self.record(Dense(f"{name}.fc2", hidden, hidden, rng))
        self.bn2 = self.record(BatchNorm(f"{name}.bn2", hidden))
        self.layers.append({"type": "dropout", "rate": dropout})
        self.head = self.record(Dense(f"{name}.head", hidden, 2, rng))

    @property
    def representation_width(self) -> int:
        return self.hidden

    def merged_features(
        self,
        inputs: Inputs,
        *,
        training: bool,
    ) -> Tensor:
        """Concatenated subject and content conv features, ``[B, 2kf]``."""

        subject = self.embedding(inputs["subject"])
        content = self.embedding(inputs["content"])
        return ops.concat(
            [
                self.subject_conv(subject, training=training),
                self.content_conv(content, training=training),
            ],
            axis=-1,
        )

    def representation(
        self,
        inputs: Inputs,
        *,
        training: bool,
        rng: np.random.Generator | None = None,
    ) -> Tensor:
        merged = self.merged_features(inputs, training=training)
        x = ops.dropout(merged, self.dropout, training=training, rng=rng)
        x = ops.relu(self.bn1(self.fc1(x), training=training))
        return ops.relu(self.bn2(self.fc2(x), training=training))

    def logits(
        self,
        inputs: Inputs,
        *,
        training: bool,
        rng: np.random.Generator | None = None,
    ) -> Tensor:
        x = self.representation(inputs, training=training, rng=rng)
        x = ops.dropout(x, self.dropout, training=training, rng=rng)
        return self.head(x)

    def encoder_parameters(self) -> list[Parameter]:
        """Every parameter except the classification head."""

        head = {id(param) for param in self.head.parameters()}
        return [p for p in self.parameters() if id(p) not in head]

    def config(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "vocab_size": self.vocab_size,
            "embedding_dim": self.embedding_dim,
            "windows": self.windows,
            "filters": self.filters,
            "hidden": self.hidden,
            "dropout": self.dropout,
            "seed": self.seed,
        }


def _word_hashes(vocab: Vocabulary) -> dict[str, str]:
    return {"subject": vocab.content_hash, "content": vocab.content_hash}


def build_content_model(
    vocab: Vocabulary,
    e: int = 64,
    *,
    dropout: float = 0.4,
    windows: int = 4,
    filters: int = 128,
    seed: int = 0,
    spec: SequenceSpec | None = None,
) -> ContentModel:
    return ContentModel(
        "content",
        vocab_size=vocab.size,
        embedding_dim=e,
        windows=windows,
        filters=filters,
        dropout=dropout,
        seed=seed,
        lengths=input_lengths(spec, ContentModel.input_names),
        vocab_hashes=_word_hashes(vocab),
    )


class ActionModel(ContentModel):
    kind = "action"


def build_action_model(
    vocab: Vocabulary,
    e: int = 64,
    *,
    dropout: float = 0.4,
    windows: int = 4,
    filters: int = 128,
    seed: int = 0,
    spec: SequenceSpec | None = None,
) -> ActionModel:
    """Same layer stack as the content model, trained on action labels."""

    return ActionModel(
        "action",
        vocab_size=vocab.size,
        embedding_dim=e,
        windows=windows,
        filters=filters,
        dropout=dropout,
        seed=seed,
        lengths=input_lengths(spec, ContentModel.input_names),
        vocab_hashes=_word_hashes(vocab),
    )
