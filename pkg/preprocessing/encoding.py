"""Fixed-length index arrays for the five model inputs."""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path
from typing import ClassVar, Iterable, Mapping, Protocol, Sequence

import numpy as np

from .tokenize import letter_trigrams, tokenize_words
from .vocabulary import Vocabulary, VocabularyMismatchError, encode
from .weak_labels import beginning_segment

INPUT_NAMES = ("subject", "content", "address", "name", "salutation")


@dataclass(frozen=True)
class SequenceSpec:
    subject: int = 30
    content: int = 1000
    address: int = 1000
    name: int = 30
    salutation: int = 10

    def __post_init__(self) -> None:
        for input_name in INPUT_NAMES:
            if getattr(self, input_name) < 1:
                raise ValueError(
                    f"sequence length for {input_name} must be >= 1"
                )

    def for_inference(self, content: int = 2000) -> SequenceSpec:
        return replace(self, content=content)

    def length(self, input_name: str) -> int:
        return int(getattr(self, input_name))


@dataclass(frozen=True)
class VocabularySet:
    """V_w, V_trig, V_name and V_salutation."""

    words: Vocabulary
    trigrams: Vocabulary
    names: Vocabulary
    salutation: Vocabulary

    FILES: ClassVar[dict[str, str]] = {
        "words": "words.vocab",
        "trigrams": "trigrams.vocab",
        "names": "names.vocab",
        "salutation": "salutation.vocab",
    }

    def for_input(self, input_name: str) -> Vocabulary:
        return {
            "subject": self.words,
            "content": self.words,
            "address": self.trigrams,
            "name": self.names,
            "salutation": self.salutation,
        }[input_name]

    def hashes(self) -> dict[str, str]:
        return {
            input_name: self.for_input(input_name).content_hash
            for input_name in INPUT_NAMES
        }

    def save(self, directory: Path) -> None:
        for attribute, filename in self.FILES.items():
            getattr(self, attribute).save(directory / filename)

    @classmethod
    def load(cls, directory: Path) -> VocabularySet:
        return cls(
            **{
                attribute: Vocabulary.load(directory / filename)
                for attribute, filename in cls.FILES.items()
            }
        )


class MessageLike(Protocol):
    subject: str
    body: str
    sender_address: str
    sender_name: str


@dataclass(frozen=True)
class EncodedBatch:
    """Index arrays keyed by input name plus the hashes that produced them."""

    arrays: Mapping[str, np.ndarray]
    vocab_hashes: Mapping[str, str]

    def __len__(self) -> int:
        return len(next(iter(self.arrays.values()))) if self.arrays else 0

    def take(self, indices: Sequence[int] | np.ndarray) -> EncodedBatch:
        rows = np.asarray(indices, dtype=np.int64)
        return EncodedBatch(
            {name: array[rows] for name, array in self.arrays.items()},
            self.vocab_hashes,
        )

    def check_hashes(self, expected: Mapping[str, str]) -> None:
        """Raise unless every expected input was encoded with that hash."""

        for input_name, content_hash in expected.items():
            actual = self.vocab_hashes.get(input_name)
            if actual != content_hash:
                raise VocabularyMismatchError(
                    f"input {input_name!r} was encoded with vocabulary "
                    f"{actual}, model expects {content_hash}"
                )


def _input_tokens(
    message: MessageLike,
    input_name: str,
    spec: SequenceSpec,
) -> list[str]:
    if input_name == "subject":
        return tokenize_words(message.subject)
    if input_name == "content":
        return tokenize_words(message.body)
    if input_name == "address":
        return letter_trigrams(message.sender_address, spec.address)
    if input_name == "name":
        return tokenize_words(message.sender_name)
    if input_name == "salutation":
        return beginning_segment(message.body)
    raise KeyError(input_name)


def encode_inputs(
    messages: Iterable[MessageLike],
    vocabs: VocabularySet,
    spec: SequenceSpec,
    inputs: Sequence[str] = INPUT_NAMES,
) -> EncodedBatch:
    """Encode ``messages`` into ``[N, length]`` int64 arrays per input."""

    messages = list(messages)
    arrays: dict[str, np.ndarray] = {}
    for input_name in inputs:
        length = spec.length(input_name)
        vocab = vocabs.for_input(input_name)
        array = np.zeros((len(messages), length), dtype=np.int64)
        for row, message in enumerate(messages):
            array[row] = encode(
                _input_tokens(message, input_name, spec), vocab, length
            )
        arrays[input_name] = array
    hashes = vocabs.hashes()
    return EncodedBatch(arrays, {name: hashes[name] for name in inputs})
