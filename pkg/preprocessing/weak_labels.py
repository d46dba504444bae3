"""Training labels derived from recipient behavior and salutations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .records import EmailRecord, GoldLabel
from .tokenize import tokenize_words
from .vocabulary import Vocabulary, encode

SEGMENT_WORDS = 7
SALUTATION_LENGTH = 10

SELECTIVITY_COLUMNS = ("random", "A", "B", "A\\B")

LabeledId = tuple[str, int]


def is_opened_not_deleted(record: EmailRecord) -> bool:
    return record.opened and not record.deleted


def is_deleted_not_opened(record: EmailRecord) -> bool:
    return record.deleted and not record.opened


@dataclass(frozen=True)
class ActionSets:
    """Messages opened-not-deleted (A), deleted-not-opened (B) and the
    senders appearing in B.
    """

    set_a: frozenset[str]
    set_b: frozenset[str]
    senders_b: frozenset[str]

    def a_minus_b(self, corpus: Iterable[EmailRecord]) -> frozenset[str]:
        return frozenset(
            record.message_id
            for record in corpus
            if record.message_id in self.set_a
            and record.sender_address not in self.senders_b
        )


def build_action_sets(corpus: Iterable[EmailRecord]) -> ActionSets:
    set_a: set[str] = set()
    set_b: set[str] = set()
    senders_b: set[str] = set()
    for record in corpus:
        if is_opened_not_deleted(record):
            set_a.add(record.message_id)
        elif is_deleted_not_opened(record):
            set_b.add(record.message_id)
            senders_b.add(record.sender_address)
    return ActionSets(frozenset(set_a), frozenset(set_b), frozenset(senders_b))


def build_action_labels(corpus: Iterable[EmailRecord]) -> list[LabeledId]:
    """Label B messages 0 and A messages from senders never in B 1.

    Messages that are both opened and deleted, or neither, are left out.
    Output is sorted by message id.
    """

    records = list(corpus)
    sets = build_action_sets(records)
    labels = [(message_id, 0) for message_id in sets.set_b]
    labels.extend((message_id, 1) for message_id in sets.a_minus_b(records))
    return sorted(labels)


def _percentages(records: Sequence[EmailRecord]) -> dict[str, float | None]:
    if not records:
        return {"H": None, "M": None, "U": None, "H_known": None}
    counts = {label: 0 for label in GoldLabel}
    for record in records:
        counts[record.gold_label or GoldLabel.UNKNOWN] += 1
    total = len(records)
    known = counts[GoldLabel.HUMAN] + counts[GoldLabel.MACHINE]
    return {
        "H": 100.0 * counts[GoldLabel.HUMAN] / total,
        "M": 100.0 * counts[GoldLabel.MACHINE] / total,
        "U": 100.0 * counts[GoldLabel.UNKNOWN] / total,
        "H_known": (
            100.0 * counts[GoldLabel.HUMAN] / known if known else None
        ),
    }


def selectivity_report(
    corpus: Iterable[EmailRecord],
) -> dict[str, dict[str, float | None]]:
    """Human/machine/unknown percentages under each action condition.

    Columns are ``random`` (every message), ``A``, ``B`` and ``A\\B``.
    ``H_known`` is the human share once unknown messages are ignored. Empty
    cells are ``None``.
    """

    records = list(corpus)
    sets = build_action_sets(records)
    a_minus_b = sets.a_minus_b(records)
    members = {
        "random": records,
        "A": [r for r in records if r.message_id in sets.set_a],
        "B": [r for r in records if r.message_id in sets.set_b],
        "A\\B": [r for r in records if r.message_id in a_minus_b],
    }
    return {column: _percentages(members[column]) for column in members}


def beginning_segment(body: str) -> list[str]:
    """Words before the first comma, or the first 7 words without one."""

    head, comma, _ = body.partition(",")
    if comma:
        return tokenize_words(head)
    return tokenize_words(body)[:SEGMENT_WORDS]


def detect_salutation(body: str, recipient_names: Sequence[str]) -> bool:
    """True when any recipient name token opens the body."""

    segment = set(beginning_segment(body))
    if not segment:
        return False
    return any(
        token in segment
        for name in recipient_names
        for token in tokenize_words(name)
    )


def build_salutation_labels(corpus: Iterable[EmailRecord]) -> list[LabeledId]:
    return sorted(
        (
            record.message_id,
            int(detect_salutation(record.body, record.recipient_names)),
        )
        for record in corpus
    )


def salutation_input(
    body: str,
    vocab: Vocabulary,
    length: int = SALUTATION_LENGTH,
) -> list[int]:
    return encode(beginning_segment(body), vocab, length)
