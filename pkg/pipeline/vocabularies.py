"""Build the four vocabularies from assembled training data."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from preprocessing.encoding import VocabularySet
from preprocessing.records import EmailRecord
from preprocessing.tokenize import (
    DEFAULT_ADDRESS_CHARS,
    letter_trigrams,
    tokenize_words,
)
from preprocessing.vocabulary import (
    Document,
    Vocabulary,
    VocabularyKind,
    build_vocabulary,
)
from preprocessing.weak_labels import beginning_segment

from .errors import DataError
from .sampling import TrainingSets


@dataclass(frozen=True)
class VocabularySizes:
    """Frequency and chi-square components of each vocabulary."""

    words_freq: int = 5000
    words_chi: int = 5000
    salutation_freq: int = 2000
    salutation_chi: int = 2000
    trigrams: int = 3000
    names: int = 2000


def _unique(records: Iterable[EmailRecord]) -> list[EmailRecord]:
    return list({record.message_id: record for record in records}.values())


def _text(record: EmailRecord) -> list[str]:
    return tokenize_words(record.subject) + tokenize_words(record.body)


def _build(
    docs: Sequence[Document],
    kind: VocabularyKind,
    n_freq: int,
    n_chi: int,
    name: str,
) -> Vocabulary:
    try:
        return build_vocabulary(docs, kind, n_freq, n_chi, name=name)
    except ValueError as exc:
        raise DataError(f"cannot build the {name} vocabulary: {exc}") from exc


def build_vocabularies(
    sets: TrainingSets,
    sizes: VocabularySizes = VocabularySizes(),
    *,
    address_chars: int = DEFAULT_ADDRESS_CHARS,
) -> VocabularySet:
    """V_w counts content and action texts and ranks chi-square on the
    content labels; V_sal does the same on salutation segments; V_trig and
    V_name use frequency only.
    """

    content_labels = {
        record.message_id: label
        for record, label in zip(sets.content.records, sets.content.labels)
    }
    word_docs: list[Document] = [
        (_text(record), content_labels.get(record.message_id))
        for record in _unique([*sets.content.records, *sets.action.records])
    ]
    words = _build(
        word_docs,
        VocabularyKind.WORD,
        sizes.words_freq,
        sizes.words_chi,
        "words",
    )

    salutation_labels = {
        record.message_id: label
        for record, label in zip(
            sets.salutation.records, sets.salutation.labels
        )
    }
    salutation_docs: list[Document] = [
        (beginning_segment(record.body), salutation_labels[record.message_id])
        for record in _unique(sets.salutation.records)
    ]
    salutation = _build(
        salutation_docs,
        VocabularyKind.WORD,
        sizes.salutation_freq,
        sizes.salutation_chi,
        "salutation",
    )

    senders = _unique([*sets.content.records, *sets.sender.records])
    trigrams = _build(
        [
            (letter_trigrams(record.sender_address, address_chars), None)
            for record in senders
        ],
        VocabularyKind.TRIGRAM,
        sizes.trigrams,
        0,
        "trigrams",
    )
    names = _build(
        [(tokenize_words(record.sender_name), None) for record in senders],
        VocabularyKind.WORD,
        sizes.names,
        0,
        "names",
    )
    return VocabularySet(
        words=words, trigrams=trigrams, names=names, salutation=salutation
    )
