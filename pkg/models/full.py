"""Full model: the content model fine-tuned alongside frozen sub-models.

The fused feature vector is, in order, the 128-unit content
representation, the sender's rectified positive and negative signals, the
action model's rectified negative signal and the 64-unit salutation
representation. A single dense layer maps it to the two classes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from nncore import ops
from nncore.layers import Dense
from nncore.tensor import Tensor

from .content import ActionModel, ContentModel
from .graph import Inputs, ModelGraph
from .salutation import SalutationModel
from .sender import SenderModel

DEFAULT_THRESHOLD = 0.99
SIGNAL_WIDTH = 3


@dataclass(frozen=True)
class RectifiedSignal:
    p_plus: float
    p_minus: float
    q: float


def _check_threshold(q: float) -> None:
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"rectification threshold must be in [0, 1], got {q}")


def rectify(p: float, q: float = DEFAULT_THRESHOLD) -> RectifiedSignal:
    """Keep ``p`` and ``1 - p`` only where they reach ``q``."""

    _check_threshold(q)
    if not np.isfinite(p) or not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must be in [0, 1], got {p}")
    p_plus = p if p >= q else 0.0
    p_minus = 1.0 - p if 1.0 - p >= q else 0.0
    return RectifiedSignal(float(p_plus), float(p_minus), q)


def rectify_array(
    p: np.ndarray,
    q: float = DEFAULT_THRESHOLD,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`rectify` returning ``(p_plus, p_minus)``."""

    _check_threshold(q)
    p = np.asarray(p, dtype=np.float64)
    if not np.all(np.isfinite(p)) or np.any((p < 0.0) | (p > 1.0)):
        raise ValueError("probabilities must be finite and in [0, 1]")
    negative = 1.0 - p
    return np.where(p >= q, p, 0.0), np.where(negative >= q, negative, 0.0)


class FullModel(ModelGraph):
    kind = "full"
    input_names = ("subject", "content", "address", "name", "salutation")

    def __init__(
        self,
        content: ContentModel,
        sender: SenderModel,
        action: ActionModel,
        salutation: SalutationModel,
        *,
        name: str = "full",
        q: float = DEFAULT_THRESHOLD,
        seed: int = 0,
    ) -> None:
        _check_threshold(q)
        super().__init__(
            name,
            vocab_hashes={
                **content.vocab_hashes,
                **sender.vocab_hashes,
                **salutation.vocab_hashes,
            },
        )
        self.q = q
        self.seed = seed
        self.content = content
        self.sender = sender
        self.action = action
        self.salutation = salutation
        for sub_model in (content, sender, action, salutation):
            self.add_child(sub_model)
        self.fusion_width = (
            content.representation_width
            + SIGNAL_WIDTH
            + salutation.representation_width
        )
        rng = np.random.default_rng(seed)
        self.head = self.record(
            Dense(f"{name}.head", self.fusion_width, 2, rng),
            inputs=[
                "content.representation",
                "sender.p_plus",
                "sender.p_minus",
                "action.p_minus",
                "salutation.representation",
            ],
        )

    def frozen_parts(self) -> list[ModelGraph]:
        return [self.sender, self.action, self.salutation]

    def check_frozen(self) -> None:
        """Raise if a sub-model or the unused content head can train."""

        unfrozen = [
            param.name
            for part in [*self.frozen_parts(), self.content.head]
            for param in part.parameters()
            if param.trainable
        ]
        if unfrozen:
            raise ValueError(f"parameters must be frozen: {unfrozen}")

    def signals(self, inputs: Inputs) -> np.ndarray:
        """Rectified sub-model signals ``[B, 3]`` computed in infer mode."""

        sender = self.sender.probabilities(inputs)[:, 1]
        action = self.action.probabilities(inputs)[:, 1]
        sender_plus, sender_minus = rectify_array(sender, self.q)
        _, action_minus = rectify_array(action, self.q)
        return np.stack([sender_plus, sender_minus, action_minus], axis=1)

    def fused_features(
        self,
        inputs: Inputs,
        *,
        training: bool,
        rng: np.random.Generator | None = None,
        signals: np.ndarray | None = None,
    ) -> Tensor:
        representation = self.content.representation(
            inputs, training=training, rng=rng
        )
        representation = ops.dropout(
            representation,
            self.content.dropout,
            training=training,
            rng=rng,
        )
        if signals is None:
            signals = self.signals(inputs)
        salutation = self.salutation.representation(inputs, training=False)
        return ops.concat(
            [representation, Tensor(signals), Tensor(salutation.data)],
            axis=-1,
        )

    def logits(
        self,
        inputs: Inputs,
        *,
        training: bool,
        rng: np.random.Generator | None = None,
    ) -> Tensor:
        features = self.fused_features(inputs, training=training, rng=rng)
        return self.head(features)

    def config(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "q": self.q,
            "seed": self.seed,
            "content": self.content.config(),
            "sender": self.sender.config(),
            "action": self.action.config(),
            "salutation": self.salutation.config(),
        }


def build_full_model(
    content: ContentModel | None,
    sender: SenderModel | None,
    action: ActionModel | None,
    salutation: SalutationModel | None,
    q: float = DEFAULT_THRESHOLD,
    *,
    seed: int = 0,
) -> FullModel:
    """Fuse trained sub-models, freezing everything but the content encoder.

    The content and action models must share their word vocabulary.
    """

    parts = {
        "content": content,
        "sender": sender,
        "action": action,
        "salutation": salutation,
    }
    missing = [name for name, model in parts.items() if model is None]
    if missing:
        raise ValueError(f"full model is missing sub-models {missing}")
    assert content and sender and action and salutation
    if content.vocab_hashes != action.vocab_hashes:
        raise ValueError(
            "content and action models were trained on different vocabularies"
        )
    for part in (sender, action, salutation):
        part.freeze()
    content.head.freeze()
    model = FullModel(content, sender, action, salutation, q=q, seed=seed)
    model.check_frozen()
    return model
