"""Rebuild models from checkpoint headers."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Mapping

from nncore.checkpoint import Checkpoint, CheckpointError, load_checkpoint

from .content import ActionModel, ContentModel
from .full import FullModel
from .graph import ModelGraph
from .salutation import SalutationModel
from .sender import SenderModel

logger = logging.getLogger(__name__)

SUB_MODELS: dict[str, type[ModelGraph]] = {
    "content": ContentModel,
    "sender": SenderModel,
    "action": ActionModel,
    "salutation": SalutationModel,
}


def _build(
    kind: str,
    config: Mapping[str, Any],
    vocab_hashes: Mapping[str, str],
) -> ModelGraph:
    if kind == "full":
        parts = {
            part: _build(part, config[part], vocab_hashes)
            for part in SUB_MODELS
        }
        return FullModel(
            parts["content"],
            parts["sender"],
            parts["action"],
            parts["salutation"],
            name=config["name"],
            q=config["q"],
            seed=config["seed"],
        )
    try:
        factory = SUB_MODELS[kind]
    except KeyError:
        raise CheckpointError(f"unknown model kind {kind!r}") from None
    config = dict(config)
    name = config.pop("name")
    hashes = {
        input_name: vocab_hashes[input_name]
        for input_name in factory.input_names
        if input_name in vocab_hashes
    }
    return factory(name, vocab_hashes=hashes, **config)


def restore(model: ModelGraph, checkpoint: Checkpoint) -> None:
    """Copy arrays and trainable flags from ``checkpoint`` into ``model``."""

    expected = {param.name for param in model.parameters()}
    if expected != set(checkpoint.arrays):
        missing = sorted(expected - set(checkpoint.arrays))
        extra = sorted(set(checkpoint.arrays) - expected)
        raise CheckpointError(
            f"checkpoint does not match model: missing {missing}, "
            f"unexpected {extra}"
        )
    for param in model.parameters():
        param.assign(checkpoint.arrays[param.name])
        if not param.buffer:
            param.set_trainable(checkpoint.trainable[param.name])


def model_from_checkpoint(checkpoint: Checkpoint) -> ModelGraph:
    model = _build(
        checkpoint.model_name,
        checkpoint.header["config"],
        checkpoint.vocab_hashes,
    )
    restore(model, checkpoint)
    return model


def load_model(path: Path) -> ModelGraph:
    model = model_from_checkpoint(load_checkpoint(path))
    logger.info("Loaded %s model from %s", model.kind, path)
    return model
