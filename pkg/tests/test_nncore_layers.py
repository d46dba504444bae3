from __future__ import annotations

import numpy as np
import pytest

from nncore import ops
from nncore.gradcheck import check_gradients
from nncore.layers import (
    ConvBlock,
    ConvBlockSpec,
    Dense,
    Embedding,
    temporal_conv_forward,
    total_penalty,
)
from nncore.tensor import ShapeError, Tensor


def test_conv_block_output_width_is_windows_times_filters() -> None:
    rng = np.random.default_rng(0)
    block = ConvBlock("block", ConvBlockSpec.up_to(4, 8), 5, rng)
    embedding = Embedding("emb", 20, 5, rng)
    out = block(embedding(rng.integers(0, 20, size=(3, 12))), training=True)
    assert out.shape == (3, 32)


def test_temporal_conv_forward_accepts_unbatched_input() -> None:
    rng = np.random.default_rng(1)
    block = ConvBlock("block", ConvBlockSpec((1, 2, 3), 4), 6, rng)
    embedding = Embedding("emb", 10, 6, rng)
    out = temporal_conv_forward(
        embedding(np.array([1, 2, 3, 4])), block, training=False
    )
    assert out.shape == (12,)


def test_conv_block_rejects_sequence_shorter_than_window() -> None:
    with pytest.raises(ShapeError):
        ConvBlock(
            "block",
            ConvBlockSpec.up_to(4, 2),
            3,
            np.random.default_rng(0),
            sequence_length=3,
        )


def test_embedding_padding_row_starts_at_zero() -> None:
    embedding = Embedding("emb", 7, 4, np.random.default_rng(0))
    assert np.all(embedding.table.data[0] == 0.0)
    assert np.all(np.abs(embedding.table.data) <= 0.05)


def test_parameter_names_carry_layer_prefix() -> None:
    block = ConvBlock(
        "m.conv", ConvBlockSpec((1, 2), 3), 4, np.random.default_rng(0)
    )
    names = [param.name for param in block.parameters()]
    assert "m.conv.w1.weight" in names
    assert "m.conv.w2.bn.running_mean" in names


def test_penalty_skips_frozen_layers() -> None:
    rng = np.random.default_rng(0)
    first = Dense("a", 3, 2, rng, l2=0.5)
    second = Dense("b", 2, 2, rng, l1=0.5)
    expected = 0.5 * np.square(first.weight.data).sum()
    second.freeze()
    penalty = total_penalty([first, second])
    assert penalty is not None
    assert float(penalty.data) == pytest.approx(expected)
    first.freeze()
    assert total_penalty([first, second]) is None


def test_conv_block_spec_validates() -> None:
    with pytest.raises(ValueError):
        ConvBlockSpec((), 4)
    with pytest.raises(ValueError):
        ConvBlockSpec((1, 2), 4, stride=2)


def _smooth(block: ConvBlock, x: Tensor, margin: float = 0.005) -> bool:
    """True when no pre-activation sits near the ReLU kink and every
    max-over-time winner is clear of the runner-up.
    """

    for weight, bias, norm in block.windows:
        normalized = norm(
            ops.conv1d(x, weight.tensor, bias.tensor), training=True
        ).data
        if np.min(np.abs(normalized)) < margin:
            return False
        top = np.sort(np.maximum(normalized, 0.0), axis=1)[:, -2:, :]
        winners = top[:, 1, :]
        gaps = winners - top[:, 0, :]
        if np.any((winners > 0.0) & (gaps < margin)):
            return False
    return True


def test_conv_block_gradients_over_seeded_cases() -> None:
    checked = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        block = ConvBlock("block", ConvBlockSpec((1, 2), 2), 3, rng)
        x = Tensor(rng.normal(size=(3, 5, 3)), requires_grad=True)
        head = Tensor(rng.normal(size=(4, 2)), requires_grad=True)
        bias = Tensor(rng.normal(size=2), requires_grad=True)
        labels = rng.integers(0, 2, size=3)
        if not _smooth(block, x):
            continue
        weights = [param.tensor for param in block.trainable_parameters()]

        def build() -> Tensor:
            loss, _ = ops.softmax_cross_entropy(
                ops.dense(block(x, training=True), head, bias), labels
            )
            return loss

        assert check_gradients(build, [x, *weights, head]) < 1e-3
        checked += 1
    assert checked >= 50
