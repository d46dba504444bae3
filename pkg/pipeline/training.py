"""Mini-batch training with validation-based checkpoint selection."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence, TypeVar

import numpy as np

from models import (
    ActionModel,
    ContentModel,
    ModelGraph,
    SalutationModel,
    SenderModel,
    build_action_model,
    build_content_model,
    build_full_model,
    build_salutation_model,
    build_sender_model,
    load_model,
)
from nncore import ops
from nncore.checkpoint import file_digest
from nncore.optim import Adam
from nncore.tensor import Tensor
from preprocessing.encoding import (
    EncodedBatch,
    SequenceSpec,
    VocabularySet,
    encode_inputs,
)

from .errors import DataError, DivergenceError
from .sampling import TrainingSet, TrainingSets

logger = logging.getLogger(__name__)

CHECKPOINT_SUFFIX = ".hmck"
SUB_MODEL_ORDER = ("content", "sender", "action", "salutation")

G = TypeVar("G", bound=ModelGraph)


@dataclass(frozen=True)
class TrainingConfig:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    batch_size: int = 128
    epochs: int = 3
    validation_fraction: float = 0.1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.batch_size < 2:
            raise ValueError("batch_size must be at least 2")
        if self.epochs < 1:
            raise ValueError("epochs must be positive")
        if not 0.0 <= self.validation_fraction < 1.0:
            raise ValueError("validation_fraction must be in [0, 1)")


@dataclass(frozen=True)
class ArchitectureConfig:
    word_embedding: int = 64
    sender_embedding: int = 64
    salutation_embedding: int = 128
    filters: int = 128
    content_windows: int = 4
    content_dropout: float = 0.4
    sender_dropout: float = 0.6
    action_dropout: float = 0.4
    salutation_dropout: float = 0.6
    q: float = 0.99


@dataclass
class TrainResult:
    checkpoint: Path | None
    digest: str | None
    best_epoch: int
    best_loss: float
    history: list[tuple[float, float | None]] = field(default_factory=list)


Snapshot = dict[str, np.ndarray]


def snapshot(model: ModelGraph) -> Snapshot:
    return {param.name: param.data.copy() for param in model.parameters()}


def restore_snapshot(
    model: ModelGraph, state: Mapping[str, np.ndarray]
) -> None:
    for param in model.parameters():
        param.assign(state[param.name])


def split_indices(
    size: int,
    validation_fraction: float,
    seed: int,
    groups: Sequence[str] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Seeded train/validation split; validation is empty for tiny sets.

    With ``groups`` (one key per row, e.g. message ids) whole groups go to
    one side, so duplicated rows never straddle the split.
    """

    rng = np.random.default_rng(seed)
    if groups is None:
        order = rng.permutation(size)
        n_validation = int(size * validation_fraction)
        train, validation = order[n_validation:], order[:n_validation]
    else:
        if len(groups) != size:
            raise ValueError("groups must have one key per row")
        unique = sorted(set(groups))
        held = int(len(unique) * validation_fraction)
        chosen = {unique[i] for i in rng.permutation(len(unique))[:held]}
        mask = np.array([key in chosen for key in groups], dtype=bool)
        train, validation = np.flatnonzero(~mask), np.flatnonzero(mask)
    if len(train) < 2:
        return np.arange(size), np.arange(0)
    return np.sort(train), np.sort(validation)


def batch_indices(
    indices: np.ndarray,
    batch_size: int,
    rng: np.random.Generator,
) -> list[np.ndarray]:
    """Shuffle and chunk; a trailing batch of one is dropped for batch norm."""

    shuffled = rng.permutation(indices)
    batches = [
        shuffled[start : start + batch_size]
        for start in range(0, len(shuffled), batch_size)
    ]
    if batches and len(batches[-1]) < 2:
        batches.pop()
    return batches


def evaluation_loss(
    model: ModelGraph,
    batch: EncodedBatch,
    labels: np.ndarray,
    *,
    chunk_size: int = 256,
) -> float:
    """Mean infer-mode cross-entropy without weight penalties.

    Returns ``nan`` as soon as a chunk produces non-finite logits.
    """

    total = 0.0
    for start in range(0, len(batch), chunk_size):
        rows = np.arange(start, min(start + chunk_size, len(batch)))
        logits = model.logits(batch.take(rows).arrays, training=False)
        if not np.all(np.isfinite(logits.data)):
            return float("nan")
        loss, _ = ops.softmax_cross_entropy(logits, labels[rows])
        total += float(loss.data) * len(rows)
    return total / len(batch)


def parameters_finite(model: ModelGraph) -> bool:
    return all(
        np.all(np.isfinite(param.data)) for param in model.parameters()
    )


def _step_loss(
    model: ModelGraph,
    inputs: Mapping[str, np.ndarray],
    labels: np.ndarray,
    rng: np.random.Generator,
) -> Tensor | None:
    logits = model.logits(inputs, training=True, rng=rng)
    if not np.all(np.isfinite(logits.data)):
        return None
    loss, _ = ops.softmax_cross_entropy(logits, labels, model.penalty())
    if not np.isfinite(loss.data):
        return None
    return loss


def train_model(
    model: ModelGraph,
    batch: EncodedBatch,
    labels: np.ndarray | list[int],
    config: TrainingConfig,
    *,
    groups: Sequence[str] | None = None,
    checkpoint_path: Path | None = None,
    metadata: Mapping[str, Any] | None = None,
    manifest: Mapping[str, str] | None = None,
) -> TrainResult:
    """Train with Adam, keep the parameters with the lowest validation loss
    and write them to ``checkpoint_path``.

    Without a validation split the mean training loss picks the epoch.
    ``groups`` keeps rows sharing a key on one side of the split. An epoch
    diverges when a step loss, a parameter or the infer-mode loss of its
    end state is non-finite; the last finite epoch is then saved.
    """

    labels = np.asarray(labels, dtype=np.int64)
    if len(batch) != len(labels):
        raise ValueError("batch and labels must have equal length")
    if len(batch) < 2:
        raise DataError(f"{model.name} needs at least two training examples")
    batch.check_hashes(model.vocab_hashes)
    train_rows, validation_rows = split_indices(
        len(batch), config.validation_fraction, config.seed, groups
    )
    check_rows = validation_rows if len(validation_rows) else train_rows
    check_batch = batch.take(check_rows)
    shuffle_rng = np.random.default_rng(config.seed)
    dropout_rng = np.random.default_rng(config.seed + 1)
    optimizer = Adam(
        model.trainable_parameters(),
        lr=config.learning_rate,
        beta1=config.beta1,
        beta2=config.beta2,
        epsilon=config.epsilon,
    )
    best_state = snapshot(model)
    last_finite = best_state
    result = TrainResult(checkpoint_path, None, 0, float("inf"))

    def save(state: Snapshot, extra: Mapping[str, Any]) -> str | None:
        if checkpoint_path is None:
            return None
        restore_snapshot(model, state)
        return model.save(
            checkpoint_path,
            metadata={**(metadata or {}), **extra},
            manifest=manifest,
        )

    def diverged(epoch: int, what: str) -> DivergenceError:
        digest = save(last_finite, {"diverged_epoch": epoch})
        logger.error(
            "%s diverged in epoch %d (%s); saved last finite state",
            model.name,
            epoch,
            what,
        )
        return DivergenceError(
            f"non-finite {what} training {model.name} in epoch {epoch}"
            + (f" (checkpoint {digest[:12]})" if digest else "")
        )

    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(1, config.epochs + 1):
            losses = []
            for rows in batch_indices(
                train_rows, config.batch_size, shuffle_rng
            ):
                optimizer.zero_grad()
                loss = _step_loss(
                    model, batch.take(rows).arrays, labels[rows], dropout_rng
                )
                if loss is None:
                    raise diverged(epoch, "loss")
                loss.backward()
                optimizer.step()
                losses.append(float(loss.data))
            if not parameters_finite(model):
                raise diverged(epoch, "parameters")
            check_loss = evaluation_loss(
                model, check_batch, labels[check_rows]
            )
            if not np.isfinite(check_loss):
                raise diverged(epoch, "validation loss")
            last_finite = snapshot(model)
            train_loss = float(np.mean(losses)) if losses else float("nan")
            validation_loss = check_loss if len(validation_rows) else None
            result.history.append((train_loss, validation_loss))
            logger.info(
                "%s epoch %d/%d: train loss %.5f, validation loss %s",
                model.name,
                epoch,
                config.epochs,
                train_loss,
                "n/a" if validation_loss is None else f"{validation_loss:.5f}",
            )
            score = train_loss if validation_loss is None else validation_loss
            if score < result.best_loss:
                result.best_loss = score
                result.best_epoch = epoch
                best_state = last_finite

    restore_snapshot(model, best_state)
    logger.info(
        "%s best epoch %d with loss %.5f",
        model.name,
        result.best_epoch,
        result.best_loss,
    )
    result.digest = save(
        best_state,
        {"best_epoch": result.best_epoch, "best_loss": result.best_loss},
    )
    return result


def encode_set(
    training_set: TrainingSet,
    vocabs: VocabularySet,
    spec: SequenceSpec,
    inputs: tuple[str, ...],
) -> tuple[EncodedBatch, np.ndarray]:
    batch = encode_inputs(training_set.records, vocabs, spec, inputs)
    return batch, np.asarray(training_set.labels, dtype=np.int64)


def build_sub_models(
    vocabs: VocabularySet,
    architecture: ArchitectureConfig,
    seed: int,
    spec: SequenceSpec | None = None,
) -> dict[str, ModelGraph]:
    return {
        "content": build_content_model(
            vocabs.words,
            architecture.word_embedding,
            dropout=architecture.content_dropout,
            windows=architecture.content_windows,
            filters=architecture.filters,
            seed=seed,
            spec=spec,
        ),
        "sender": build_sender_model(
            vocabs.trigrams,
            vocabs.names,
            architecture.sender_embedding,
            dropout=architecture.sender_dropout,
            filters=architecture.filters,
            seed=seed + 1,
            spec=spec,
        ),
        "action": build_action_model(
            vocabs.words,
            architecture.word_embedding,
            dropout=architecture.action_dropout,
            windows=architecture.content_windows,
            filters=architecture.filters,
            seed=seed + 2,
            spec=spec,
        ),
        "salutation": build_salutation_model(
            vocabs.salutation,
            architecture.salutation_embedding,
            dropout=architecture.salutation_dropout,
            filters=architecture.filters,
            seed=seed + 3,
            spec=spec,
        ),
    }


def _load_as(path: Path, kind: type[G]) -> G:
    model = load_model(path)
    if not isinstance(model, kind):
        raise DataError(f"{path} holds a {model.kind} model")
    return model


def train_all(
    sets: TrainingSets,
    vocabs: VocabularySet,
    output_dir: Path,
    *,
    spec: SequenceSpec = SequenceSpec(),
    config: TrainingConfig = TrainingConfig(),
    architecture: ArchitectureConfig = ArchitectureConfig(),
) -> dict[str, TrainResult]:
    """Train the four sub-models, then the full model on top of them.

    Sub-models are reloaded from their checkpoints before fusion so the
    full model sees exactly the saved weights.
    """

    metadata = {
        "seed": config.seed,
        "sequence": asdict(spec),
        "training": asdict(config),
        "content_tap": "relu(bn2(fc2))",
        "salutation_tap": "relu(fc)",
    }
    models = build_sub_models(vocabs, architecture, config.seed, spec)
    results: dict[str, TrainResult] = {}
    paths: dict[str, Path] = {}
    for name in SUB_MODEL_ORDER:
        model = models[name]
        batch, labels = encode_set(
            sets.as_dict()[name], vocabs, spec, model.input_names
        )
        paths[name] = output_dir / f"{name}{CHECKPOINT_SUFFIX}"
        results[name] = train_model(
            model,
            batch,
            labels,
            config,
            groups=sets.as_dict()[name].message_ids(),
            checkpoint_path=paths[name],
            metadata=metadata,
        )

    full = build_full_model(
        _load_as(paths["content"], ContentModel),
        _load_as(paths["sender"], SenderModel),
        _load_as(paths["action"], ActionModel),
        _load_as(paths["salutation"], SalutationModel),
        architecture.q,
        seed=config.seed + 4,
    )
    batch, labels = encode_set(sets.content, vocabs, spec, full.input_names)
    results["full"] = train_model(
        full,
        batch,
        labels,
        config,
        groups=sets.content.message_ids(),
        checkpoint_path=output_dir / f"full{CHECKPOINT_SUFFIX}",
        metadata=metadata,
        manifest={name: file_digest(paths[name]) for name in SUB_MODEL_ORDER},
    )
    return results
