from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from models import build_content_model, load_model
from nncore.checkpoint import file_digest, load_checkpoint
from pipeline import training
from pipeline.errors import DataError, DivergenceError
from pipeline.sampling import assemble_training_sets, dedup_and_cap
from pipeline.synth import SynthSpec, generate_corpus
from pipeline.training import (
    ArchitectureConfig,
    TrainingConfig,
    batch_indices,
    split_indices,
    train_all,
    train_model,
)
from pipeline.vocabularies import VocabularySizes, build_vocabularies
from preprocessing.encoding import SequenceSpec, encode_inputs

SMALL_CONFIG = TrainingConfig(
    learning_rate=0.01, batch_size=4, epochs=2, validation_fraction=0.25
)


def _build_content(tiny_vocabs):
    return build_content_model(tiny_vocabs.words, e=16, filters=8, seed=0)


def _labels(messages) -> np.ndarray:
    return np.array([m.class_label for m in messages])


def test_split_indices_is_seeded_and_disjoint() -> None:
    train, validation = split_indices(20, 0.25, seed=3)
    assert len(validation) == 5
    assert set(train).isdisjoint(validation)
    assert sorted([*train, *validation]) == list(range(20))
    again = split_indices(20, 0.25, seed=3)
    np.testing.assert_array_equal(train, again[0])
    assert len(split_indices(2, 0.5, seed=0)[1]) == 0


def test_split_indices_keeps_groups_on_one_side() -> None:
    groups = [f"m{i // 3:02d}" for i in range(30)]
    train, validation = split_indices(30, 0.3, seed=4, groups=groups)
    assert sorted([*train, *validation]) == list(range(30))
    held = {groups[i] for i in validation}
    assert len(held) == 3
    assert held.isdisjoint(groups[i] for i in train)
    again = split_indices(30, 0.3, seed=4, groups=groups)
    np.testing.assert_array_equal(validation, again[1])


def test_split_indices_by_group_falls_back_for_tiny_sets() -> None:
    train, validation = split_indices(3, 0.5, seed=0, groups=["a", "a", "b"])
    assert list(train) == [0, 1, 2]
    assert len(validation) == 0
    with pytest.raises(ValueError):
        split_indices(3, 0.5, seed=0, groups=["a"])


def test_batch_indices_drop_single_trailing_row() -> None:
    rng = np.random.default_rng(0)
    batches = batch_indices(np.arange(9), 4, rng)
    assert [len(b) for b in batches] == [4, 4]
    batches = batch_indices(np.arange(10), 4, rng)
    assert [len(b) for b in batches] == [4, 4, 2]


def test_training_config_validation() -> None:
    with pytest.raises(ValueError):
        TrainingConfig(batch_size=1)
    with pytest.raises(ValueError):
        TrainingConfig(validation_fraction=1.0)


def test_train_model_writes_best_checkpoint(
    tmp_path: Path, tiny_messages, tiny_vocabs, tiny_spec
) -> None:
    model = _build_content(tiny_vocabs)
    batch = encode_inputs(tiny_messages, tiny_vocabs, tiny_spec)
    path = tmp_path / "content.hmck"
    result = train_model(
        model, batch, _labels(tiny_messages), SMALL_CONFIG,
        checkpoint_path=path, metadata={"seed": 0},
    )
    assert len(result.history) == 2
    assert result.best_epoch in (1, 2)
    assert result.digest == file_digest(path)
    header = load_checkpoint(path).header
    assert header["metadata"]["best_epoch"] == result.best_epoch
    assert header["metadata"]["seed"] == 0
    assert load_model(path).kind == "content"


def test_training_is_deterministic(
    tmp_path: Path, tiny_messages, tiny_vocabs, tiny_spec
) -> None:
    digests = []
    for run in range(2):
        model = _build_content(tiny_vocabs)
        batch = encode_inputs(tiny_messages, tiny_vocabs, tiny_spec)
        result = train_model(
            model, batch, _labels(tiny_messages), SMALL_CONFIG,
            checkpoint_path=tmp_path / f"run{run}.hmck",
        )
        digests.append(result.digest)
    assert digests[0] == digests[1]


def test_tiny_set_without_validation_uses_train_loss(
    tiny_messages, tiny_vocabs, tiny_spec
) -> None:
    model = _build_content(tiny_vocabs)
    batch = encode_inputs(tiny_messages[:2], tiny_vocabs, tiny_spec)
    config = TrainingConfig(batch_size=4, epochs=1, validation_fraction=0.5)
    result = train_model(model, batch, [1, 1], config)
    assert result.history[0][1] is None
    assert result.digest is None
    with pytest.raises(DataError):
        train_model(model, batch.take([0]), [1], config)


def test_divergence_saves_last_finite_epoch(
    tmp_path: Path, monkeypatch, tiny_messages, tiny_vocabs, tiny_spec
) -> None:
    batch = encode_inputs(tiny_messages, tiny_vocabs, tiny_spec)
    labels = _labels(tiny_messages)
    one_epoch = _build_content(tiny_vocabs)
    train_model(
        one_epoch,
        batch,
        labels,
        TrainingConfig(
            learning_rate=0.01, batch_size=4, epochs=1, validation_fraction=0.25
        ),
    )

    step_loss = training._step_loss
    calls = {"count": 0}

    def failing_step(*args, **kwargs):
        calls["count"] += 1
        # Six training rows in batches of four: two steps per epoch.
        if calls["count"] > 2:
            return None
        return step_loss(*args, **kwargs)

    monkeypatch.setattr(training, "_step_loss", failing_step)
    path = tmp_path / "content.hmck"
    with pytest.raises(DivergenceError, match="epoch 2"):
        train_model(
            _build_content(tiny_vocabs),
            batch,
            labels,
            SMALL_CONFIG,
            checkpoint_path=path,
        )
    checkpoint = load_checkpoint(path)
    assert checkpoint.header["metadata"]["diverged_epoch"] == 2
    for param in one_epoch.parameters():
        np.testing.assert_allclose(
            checkpoint.arrays[param.name], param.data, rtol=1e-6, atol=1e-6
        )


def test_train_all_fuses_reloaded_sub_models(tmp_path: Path) -> None:
    corpus = dedup_and_cap(
        generate_corpus(SynthSpec(n_messages=600, human_fraction=0.3))
    )
    sets = assemble_training_sets(corpus)
    sizes = VocabularySizes(
        words_freq=40,
        words_chi=40,
        salutation_freq=10,
        salutation_chi=10,
        trigrams=60,
        names=30,
    )
    vocabs = build_vocabularies(sets, sizes, address_chars=40)
    spec = SequenceSpec(subject=6, content=24, address=40, name=4, salutation=6)
    architecture = ArchitectureConfig(
        word_embedding=8,
        sender_embedding=8,
        salutation_embedding=8,
        filters=4,
    )
    config = TrainingConfig(batch_size=64, epochs=1, seed=2)
    results = train_all(
        sets,
        vocabs,
        tmp_path,
        spec=spec,
        config=config,
        architecture=architecture,
    )
    assert list(results) == [
        "content", "sender", "action", "salutation", "full"
    ]
    manifest = load_checkpoint(tmp_path / "full.hmck").header["manifest"]
    for name in ("content", "sender", "action", "salutation"):
        assert manifest[name] == file_digest(tmp_path / f"{name}.hmck")
    full = load_model(tmp_path / "full.hmck")
    full.check_frozen()
    sender = load_model(tmp_path / "sender.hmck")
    for loaded, trained in zip(
        sender.parameters(), full.sender.parameters(), strict=True
    ):
        np.testing.assert_array_equal(loaded.data, trained.data)


@pytest.mark.parametrize("validation_fraction", [0.0, 0.25])
def test_exploding_updates_stop_at_the_first_epoch(
    tmp_path: Path, validation_fraction, tiny_messages, tiny_vocabs, tiny_spec
) -> None:
    batch = encode_inputs(tiny_messages, tiny_vocabs, tiny_spec)
    config = TrainingConfig(
        learning_rate=1e300,
        batch_size=8,
        epochs=3,
        validation_fraction=validation_fraction,
    )
    path = tmp_path / "content.hmck"
    with pytest.raises(DivergenceError, match="epoch 1"):
        train_model(
            _build_content(tiny_vocabs),
            batch,
            _labels(tiny_messages),
            config,
            checkpoint_path=path,
        )
    checkpoint = load_checkpoint(path)
    assert checkpoint.header["metadata"]["diverged_epoch"] == 1
    initial = _build_content(tiny_vocabs)
    for param in initial.parameters():
        saved = checkpoint.arrays[param.name]
        assert np.all(np.isfinite(saved))
        np.testing.assert_allclose(saved, param.data, rtol=1e-6, atol=1e-6)


def test_train_all_splits_duplicated_messages_together(
    tmp_path: Path, monkeypatch
) -> None:
    corpus = dedup_and_cap(
        generate_corpus(SynthSpec(n_messages=600, human_fraction=0.3))
    )
    sets = assemble_training_sets(corpus)
    seen: dict[str, list[str] | None] = {}
    train = training.train_model

    def recording_train(model, batch, labels, config, **kwargs):
        seen[model.name] = kwargs.get("groups")
        return train(model, batch, labels, config, **kwargs)

    monkeypatch.setattr(training, "train_model", recording_train)
    sizes = VocabularySizes(
        words_freq=20,
        words_chi=20,
        salutation_freq=5,
        salutation_chi=5,
        trigrams=30,
        names=15,
    )
    vocabs = build_vocabularies(sets, sizes, address_chars=40)
    train_all(
        sets,
        vocabs,
        tmp_path,
        spec=SequenceSpec(
            subject=6, content=12, address=40, name=4, salutation=6
        ),
        config=TrainingConfig(batch_size=64, epochs=1),
        architecture=ArchitectureConfig(
            word_embedding=4,
            sender_embedding=4,
            salutation_embedding=4,
            filters=2,
        ),
    )
    assert seen["sender"] == sets.sender.message_ids()
    assert seen["full"] == sets.content.message_ids()
