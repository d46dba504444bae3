from __future__ import annotations

import numpy as np
import pytest

from models.content import build_action_model, build_content_model
from models.salutation import build_salutation_model
from models.sender import build_sender_model
from nncore.optim import Adam
from nncore.tensor import ShapeError
from preprocessing.encoding import EncodedBatch, SequenceSpec, encode_inputs
from preprocessing.weak_labels import (
    build_action_labels,
    build_salutation_labels,
)


def _build_batch(tiny_messages, tiny_vocabs, tiny_spec) -> EncodedBatch:
    return encode_inputs(tiny_messages, tiny_vocabs, tiny_spec)


def _labels(tiny_messages) -> np.ndarray:
    return np.array([m.class_label for m in tiny_messages])


def test_content_model_feature_widths(
    tiny_messages, tiny_vocabs, tiny_spec
) -> None:
    model = build_content_model(tiny_vocabs.words)
    batch = _build_batch(tiny_messages, tiny_vocabs, tiny_spec)
    merged = model.merged_features(batch.arrays, training=False)
    representation = model.representation(batch.arrays, training=False)
    assert merged.shape == (8, 1024)
    assert representation.shape == (8, 128)
    assert np.all(representation.data >= 0.0)
    assert model.logits(batch.arrays, training=False).shape == (8, 2)


def test_action_model_has_content_layers(tiny_vocabs) -> None:
    content = build_content_model(tiny_vocabs.words)
    action = build_action_model(tiny_vocabs.words)
    assert action.layers == content.layers
    assert action.kind == "action"
    assert action.vocab_hashes == content.vocab_hashes


def test_sender_model_branch_widths_and_penalties(
    tiny_messages, tiny_vocabs, tiny_spec
) -> None:
    model = build_sender_model(tiny_vocabs.trigrams, tiny_vocabs.names)
    batch = _build_batch(tiny_messages, tiny_vocabs, tiny_spec)
    features = model.branch_features(batch.arrays, training=False)
    assert features.shape == (8, 768)
    assert model.fc.spec()["l2"] == pytest.approx(0.001)
    assert model.head.spec()["l1"] == pytest.approx(0.0001)
    assert model.head.spec()["l2"] == pytest.approx(0.0001)
    assert model.penalty() is not None
    assert set(model.vocab_hashes) == {"address", "name"}


def test_salutation_representation_width(
    tiny_messages, tiny_vocabs, tiny_spec
) -> None:
    model = build_salutation_model(tiny_vocabs.salutation)
    batch = _build_batch(tiny_messages, tiny_vocabs, tiny_spec)
    representation = model.representation(batch.arrays, training=False)
    assert representation.shape == (8, 64)
    assert model.representation_width == 64
    assert model.embedding.spec()["dim"] == 128


def test_dropout_rate_is_validated(tiny_vocabs) -> None:
    with pytest.raises(ValueError):
        build_content_model(tiny_vocabs.words, dropout=1.0)
    with pytest.raises(ValueError):
        build_salutation_model(tiny_vocabs.salutation, dropout=-0.1)


def test_same_seed_builds_identical_models(tiny_vocabs) -> None:
    first = build_sender_model(tiny_vocabs.trigrams, tiny_vocabs.names, seed=3)
    second = build_sender_model(tiny_vocabs.trigrams, tiny_vocabs.names, seed=3)
    for a, b in zip(first.parameters(), second.parameters(), strict=True):
        assert a.name == b.name
        np.testing.assert_array_equal(a.data, b.data)


def test_content_model_fits_tiny_set(
    tiny_messages, tiny_vocabs, tiny_spec
) -> None:
    model = build_content_model(
        tiny_vocabs.words, e=16, filters=8, dropout=0.0, seed=1
    )
    batch = _build_batch(tiny_messages, tiny_vocabs, tiny_spec)
    labels = _labels(tiny_messages)
    optimizer = Adam(model.trainable_parameters(), lr=0.01)
    first, _ = model.loss(batch.arrays, labels, training=True)
    loss = first
    for _ in range(60):
        optimizer.zero_grad()
        loss, _ = model.loss(batch.arrays, labels, training=True)
        loss.backward()
        optimizer.step()
    assert float(loss.data) < 0.5 * float(first.data)


def test_content_padding_beyond_text_does_not_change_output(
    tiny_messages, tiny_vocabs, tiny_spec
) -> None:
    model = build_content_model(tiny_vocabs.words, e=16, filters=8, seed=2)
    short = encode_inputs(tiny_messages, tiny_vocabs, tiny_spec)
    long = encode_inputs(
        tiny_messages, tiny_vocabs, tiny_spec.for_inference(content=24)
    )
    np.testing.assert_allclose(
        model.probabilities(short.arrays),
        model.probabilities(long.arrays),
        rtol=0.0,
        atol=1e-12,
    )


def _separable_model(kind, vocabs):
    options = {"e": 16, "filters": 8, "dropout": 0.0, "seed": 5}
    if kind == "content":
        return build_content_model(vocabs.words, **options)
    if kind == "action":
        return build_action_model(vocabs.words, **options)
    if kind == "salutation":
        return build_salutation_model(vocabs.salutation, **options)
    return build_sender_model(vocabs.trigrams, vocabs.names, **options)


def _separable_labels(kind, messages) -> np.ndarray:
    if kind == "action":
        labels = dict(build_action_labels(messages))
    elif kind == "salutation":
        labels = dict(build_salutation_labels(messages))
    else:
        labels = {m.message_id: m.class_label for m in messages}
    return np.array([labels[m.message_id] for m in messages])


@pytest.mark.parametrize("kind", ["content", "action", "salutation", "sender"])
def test_sub_model_fits_separable_set(
    kind, separable_messages, separable_vocabs
) -> None:
    spec = SequenceSpec(subject=6, content=12, address=24, name=4, salutation=6)
    batch = encode_inputs(separable_messages, separable_vocabs, spec)
    labels = _separable_labels(kind, separable_messages)
    assert 0 < labels.sum() < len(labels)
    model = _separable_model(kind, separable_vocabs)
    optimizer = Adam(model.trainable_parameters(), lr=0.01)
    for _ in range(200):
        optimizer.zero_grad()
        loss, _ = model.loss(batch.arrays, labels, training=True)
        loss.backward()
        optimizer.step()
    logits = model.logits(batch.arrays, training=True).data
    accuracy = float(np.mean(np.argmax(logits, axis=1) == labels))
    assert accuracy >= 0.95


def test_windows_longer_than_the_input_are_rejected(tiny_vocabs) -> None:
    with pytest.raises(ShapeError):
        build_salutation_model(
            tiny_vocabs.salutation, spec=SequenceSpec(salutation=2)
        )
    with pytest.raises(ShapeError):
        build_content_model(tiny_vocabs.words, spec=SequenceSpec(subject=3))
    with pytest.raises(ShapeError):
        build_sender_model(
            tiny_vocabs.trigrams, tiny_vocabs.names, spec=SequenceSpec(name=2)
        )


def test_builders_accept_lengths_covering_every_window(
    tiny_vocabs, tiny_spec
) -> None:
    build_content_model(tiny_vocabs.words, e=8, filters=4, spec=tiny_spec)
    build_action_model(tiny_vocabs.words, e=8, filters=4, spec=tiny_spec)
    build_sender_model(
        tiny_vocabs.trigrams, tiny_vocabs.names, e=8, filters=4, spec=tiny_spec
    )
    build_salutation_model(
        tiny_vocabs.salutation, e=8, filters=4, spec=tiny_spec
    )
