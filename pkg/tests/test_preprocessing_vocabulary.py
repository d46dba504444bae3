from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from preprocessing.vocabulary import (
    OOV_INDEX,
    PAD_INDEX,
    Vocabulary,
    VocabularyKind,
    VocabularyMismatchError,
    build_vocabulary,
    chi_square_scores,
    chi_square_table,
    encode,
)


def _build_docs() -> list[tuple[list[str], int | None]]:
    return [
        (["hi", "lunch", "the"], 1),
        (["hi", "dinner", "the"], 1),
        (["unsubscribe", "offer", "the"], 0),
        (["unsubscribe", "deal", "the"], 0),
        (["the", "the", "news"], None),
    ]


def test_chi_square_ranks_class_specific_tokens_above_shared_ones() -> None:
    docs = _build_docs()
    assert chi_square_scores(docs, "hi") == pytest.approx(4.0)
    assert chi_square_scores(docs, "the") == pytest.approx(0.0)
    table = chi_square_table(docs)
    assert table["unsubscribe"] == pytest.approx(table["hi"])
    assert "news" not in table


def test_chi_square_is_symmetric_under_label_swap() -> None:
    rng = np.random.default_rng(5)
    pool = ["hi", "offer", "lunch", "deal", "the", "news", "team"]
    for _ in range(50):
        docs = [
            (
                [pool[i] for i in rng.integers(len(pool), size=4)],
                int(rng.integers(2)),
            )
            for _ in range(12)
        ]
        docs += [(["hi"], 0), (["offer"], 1)]
        swapped = [(tokens, 1 - label) for tokens, label in docs]
        table = chi_square_table(docs)
        assert chi_square_table(swapped) == pytest.approx(table)
        assert all(score >= 0.0 for score in table.values())


def test_chi_square_needs_both_classes() -> None:
    with pytest.raises(ValueError):
        chi_square_scores([(["a"], 1)], "a")


def test_build_vocabulary_orders_by_frequency_then_token() -> None:
    vocab = build_vocabulary(_build_docs(), VocabularyKind.WORD, 2, 0)
    assert vocab.lookup("the") == 2
    assert vocab.lookup("hi") == 3
    assert vocab.lookup("zzz") == OOV_INDEX
    assert vocab.size == 4


def test_build_vocabulary_unions_frequency_and_chi_square() -> None:
    vocab = build_vocabulary(_build_docs(), VocabularyKind.WORD, 1, 2)
    assert {"the", "hi", "unsubscribe"} <= set(vocab.token_to_index)
    assert vocab.size == 5


def test_build_vocabulary_validates_sizes() -> None:
    with pytest.raises(ValueError):
        build_vocabulary(_build_docs(), VocabularyKind.WORD, 0, 0)
    with pytest.raises(ValueError):
        build_vocabulary([], VocabularyKind.WORD, 1, 0)


def test_encode_truncates_and_pads() -> None:
    vocab = Vocabulary.from_tokens(["a", "b"])
    assert encode(["a", "x", "b"], vocab, 5) == [2, OOV_INDEX, 3, PAD_INDEX, 0]
    assert encode(["b", "a", "a"], vocab, 2) == [3, 2]
    assert encode([], vocab, 3) == [0, 0, 0]


def test_vocabulary_save_load_keeps_hash(tmp_path: Path) -> None:
    vocab = Vocabulary.from_tokens(
        ["#ab", "abc"], VocabularyKind.TRIGRAM, "trigrams"
    )
    path = tmp_path / "trigrams.vocab"
    vocab.save(path)
    loaded = Vocabulary.load(path)
    assert loaded == vocab
    assert loaded.content_hash == vocab.content_hash


def test_vocabulary_load_detects_edits(tmp_path: Path) -> None:
    path = tmp_path / "words.vocab"
    Vocabulary.from_tokens(["a", "b"]).save(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    lines[1] = "z\t2"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    with pytest.raises(VocabularyMismatchError):
        Vocabulary.load(path)


def test_hash_depends_on_kind() -> None:
    words = Vocabulary.from_tokens(["abc"], VocabularyKind.WORD)
    trigrams = Vocabulary.from_tokens(["abc"], VocabularyKind.TRIGRAM)
    assert words.content_hash != trigrams.content_hash
