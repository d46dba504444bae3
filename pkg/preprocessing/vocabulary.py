"""Vocabulary construction, chi-square selection and index encoding."""

from __future__ import annotations

import hashlib
import json
import logging
from collections import Counter
from dataclasses import dataclass, field
try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        """Backport of ``enum.StrEnum`` from Python 3.11."""

        __str__ = str.__str__
        __format__ = str.__format__

        @staticmethod
        def _generate_next_value_(name, start, count, last_values):
            return name.lower()
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .tokenize import TOKENIZER_VERSION, TRIGRAM_BOUNDARY

logger = logging.getLogger(__name__)

PAD_INDEX = 0
OOV_INDEX = 1
RESERVED = {PAD_INDEX: "<pad>", OOV_INDEX: "<oov>"}
VOCABULARY_VERSION = 1

Document = tuple[Sequence[str], int | None]
"""Token sequence with an optional 0/1 class label."""


class VocabularyKind(StrEnum):
    WORD = "word"
    TRIGRAM = "trigram"


class VocabularyMismatchError(ValueError):
    """Raised when inputs were encoded with a different vocabulary."""


@dataclass(frozen=True)
class Vocabulary:
    """Token to index map with 0 reserved for padding and 1 for OOV."""

    token_to_index: Mapping[str, int]
    kind: VocabularyKind = VocabularyKind.WORD
    name: str = ""
    content_hash: str = field(init=False)

    def __post_init__(self) -> None:
        expected = set(range(2, len(self.token_to_index) + 2))
        if set(self.token_to_index.values()) != expected:
            raise ValueError("vocabulary indices must be dense from 2")
        object.__setattr__(self, "content_hash", self._hash())

    @classmethod
    def from_tokens(
        cls,
        tokens: Iterable[str],
        kind: VocabularyKind = VocabularyKind.WORD,
        name: str = "",
    ) -> Vocabulary:
        """Assign indices from 2 upward in the given order."""

        ordered = list(dict.fromkeys(tokens))
        return cls(
            {token: index for index, token in enumerate(ordered, start=2)},
            kind=kind,
            name=name,
        )

    @property
    def size(self) -> int:
        return len(self.token_to_index) + len(RESERVED)

    def __len__(self) -> int:
        return self.size

    def __contains__(self, token: object) -> bool:
        return token in self.token_to_index

    def lookup(self, token: str) -> int:
        return self.token_to_index.get(token, OOV_INDEX)

    def lines(self) -> list[str]:
        ordered = sorted(self.token_to_index.items(), key=lambda item: item[1])
        return [f"{token}\t{index}" for token, index in ordered]

    def _hash(self) -> str:
        digest = hashlib.sha256()
        digest.update(f"{self.kind}|{TOKENIZER_VERSION}\n".encode("utf-8"))
        for line in self.lines():
            digest.update(line.encode("utf-8"))
            digest.update(b"\n")
        return digest.hexdigest()

    def save(self, path: Path) -> None:
        """Write a JSON header line then ``token<TAB>index`` lines."""

        header = {
            "boundary": TRIGRAM_BOUNDARY,
            "hash": self.content_hash,
            "kind": str(self.kind),
            "name": self.name,
            "size": self.size,
            "tokenizer_version": TOKENIZER_VERSION,
            "version": VOCABULARY_VERSION,
        }
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="\n") as file:
            file.write(json.dumps(header, sort_keys=True) + "\n")
            for line in self.lines():
                file.write(line + "\n")

    @classmethod
    def load(cls, path: Path) -> Vocabulary:
        with path.open("r", encoding="utf-8") as file:
            header = json.loads(file.readline())
            mapping: dict[str, int] = {}
            for line in file:
                line = line.rstrip("\n")
                if not line:
                    continue
                token, _, index = line.rpartition("\t")
                mapping[token] = int(index)
        if header.get("version") != VOCABULARY_VERSION:
            raise ValueError(f"unsupported vocabulary version in {path}")
        if header.get("tokenizer_version") != TOKENIZER_VERSION:
            raise VocabularyMismatchError(
                f"{path} was built with tokenizer version "
                f"{header.get('tokenizer_version')}"
            )
        vocabulary = cls(
            mapping,
            kind=VocabularyKind(header["kind"]),
            name=header.get("name", ""),
        )
        if vocabulary.content_hash != header["hash"]:
            raise VocabularyMismatchError(f"hash mismatch in {path}")
        return vocabulary


def encode(tokens: Sequence[str], vocab: Vocabulary, length: int) -> list[int]:
    """Map tokens to indices, truncate to ``length`` and right-pad with 0."""

    indices = [vocab.lookup(token) for token in tokens[:length]]
    return indices + [PAD_INDEX] * (length - len(indices))


def _chi_square(a: int, b: int, c: int, d: int) -> float:
    total = a + b + c + d
    denominator = (a + b) * (c + d) * (a + c) * (b + d)
    if denominator == 0:
        return 0.0
    return total * (a * d - b * c) ** 2 / denominator


def _class_totals(docs: Sequence[Document]) -> tuple[int, int]:
    positives = sum(1 for _, label in docs if label == 1)
    negatives = sum(1 for _, label in docs if label == 0)
    return positives, negatives


def chi_square_scores(docs: Sequence[Document], token: str) -> float:
    """2x2 chi-square of document-level presence of ``token`` vs label.

    Unlabeled documents are ignored. Zero marginals score 0.
    """

    positives, negatives = _class_totals(docs)
    if positives == 0 or negatives == 0:
        raise ValueError("chi-square needs documents of both classes")
    a = sum(1 for tokens, label in docs if label == 1 and token in tokens)
    b = sum(1 for tokens, label in docs if label == 0 and token in tokens)
    return _chi_square(a, b, positives - a, negatives - b)


def chi_square_table(docs: Sequence[Document]) -> dict[str, float]:
    """Score every token seen in a labeled document."""

    positives, negatives = _class_totals(docs)
    if positives == 0 or negatives == 0:
        raise ValueError("chi-square needs documents of both classes")
    present: dict[int, Counter[str]] = {0: Counter(), 1: Counter()}
    for tokens, label in docs:
        if label in present:
            present[label].update(set(tokens))
    scores: dict[str, float] = {}
    for token in present[0].keys() | present[1].keys():
        a = present[1][token]
        b = present[0][token]
        scores[token] = _chi_square(a, b, positives - a, negatives - b)
    return scores


def build_vocabulary(
    corpus: Sequence[Document],
    kind: VocabularyKind | str,
    n_freq: int,
    n_chi: int,
    *,
    name: str = "",
) -> Vocabulary:
    """Union of the top ``n_freq`` tokens by frequency and top ``n_chi`` by
    chi-square, indexed by descending frequency then token.
    """

    if n_freq < 0 or n_chi < 0:
        raise ValueError("vocabulary sizes must be non-negative")
    if n_freq + n_chi == 0:
        raise ValueError("n_freq + n_chi must be positive")
    if not corpus:
        raise ValueError("cannot build a vocabulary from an empty corpus")
    frequency: Counter[str] = Counter()
    for tokens, _ in corpus:
        frequency.update(tokens)

    by_frequency = sorted(
        frequency.items(), key=lambda item: (-item[1], item[0])
    )
    selected = {token for token, _ in by_frequency[:n_freq]}
    if n_chi:
        chi = chi_square_table(corpus)
        ranked = sorted(
            chi.items(),
            key=lambda item: (-item[1], -frequency[item[0]], item[0]),
        )
        selected.update(token for token, _ in ranked[:n_chi])

    ordered = sorted(selected, key=lambda token: (-frequency[token], token))
    vocabulary = Vocabulary.from_tokens(ordered, VocabularyKind(kind), name)
    logger.info(
        "Built %s vocabulary %r with %d entries",
        vocabulary.kind,
        name,
        vocabulary.size,
    )
    return vocabulary
