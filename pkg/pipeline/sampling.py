"""Deduplication, per-day capping and training-set assembly."""

from __future__ import annotations

import logging
import random
from collections import Counter, defaultdict
from dataclasses import dataclass
from datetime import timedelta
from typing import Iterable, Sequence

from preprocessing.records import EmailRecord
from preprocessing.weak_labels import build_action_labels, detect_salutation

from .errors import DataError

logger = logging.getLogger(__name__)

DEFAULT_PER_DAY_CAP = 5
DEFAULT_ACTION_WINDOW_DAYS = 3
DEFAULT_DUPLICATION = 10
DUPLICATION_RANGE = (10, 50)


def dedup_and_cap(
    corpus: Iterable[EmailRecord],
    per_day_cap: int = DEFAULT_PER_DAY_CAP,
) -> list[EmailRecord]:
    """Keep one message per (sender, subject, day), then at most
    ``per_day_cap`` per sender and day, earliest message id first.
    """

    if per_day_cap < 1:
        raise ValueError("per_day_cap must be positive")
    records = sorted(corpus, key=lambda record: record.message_id)
    seen: set[tuple[str, str, object]] = set()
    per_day: Counter[tuple[str, object]] = Counter()
    kept = []
    for record in records:
        if record.day is None:
            raise DataError(f"message {record.message_id} has no day")
        key = (record.sender_address, record.subject, record.day)
        if key in seen:
            continue
        seen.add(key)
        sender_day = (record.sender_address, record.day)
        if per_day[sender_day] >= per_day_cap:
            continue
        per_day[sender_day] += 1
        kept.append(record)
    logger.info(
        "Dedup and cap kept %d of %d messages (cap %d)",
        len(kept),
        len(records),
        per_day_cap,
    )
    return kept


@dataclass(frozen=True)
class TrainingSet:
    name: str
    records: tuple[EmailRecord, ...]
    labels: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.records) != len(self.labels):
            raise ValueError("records and labels must have equal length")

    def __len__(self) -> int:
        return len(self.records)

    def message_ids(self) -> list[str]:
        return [record.message_id for record in self.records]

    def class_counts(self) -> dict[int, int]:
        counts = Counter(self.labels)
        return {0: counts[0], 1: counts[1]}


@dataclass(frozen=True)
class TrainingSets:
    content: TrainingSet
    sender: TrainingSet
    action: TrainingSet
    salutation: TrainingSet

    def as_dict(self) -> dict[str, TrainingSet]:
        return {
            "content": self.content,
            "sender": self.sender,
            "action": self.action,
            "salutation": self.salutation,
        }


def _checked(
    name: str, pairs: Sequence[tuple[EmailRecord, int]]
) -> TrainingSet:
    if not pairs:
        raise DataError(f"{name} training set is empty")
    labels = {label for _, label in pairs}
    if 1 not in labels:
        raise DataError(f"{name} training set has no positive examples")
    if 0 not in labels:
        raise DataError(f"{name} training set has no negative examples")
    return TrainingSet(
        name,
        tuple(record for record, _ in pairs),
        tuple(label for _, label in pairs),
    )


def gold_labeled(
    corpus: Iterable[EmailRecord],
    duplication: int = DEFAULT_DUPLICATION,
) -> list[tuple[EmailRecord, int]]:
    """Known-label records, editorial ones repeated ``duplication`` times."""

    low, high = DUPLICATION_RANGE
    if not low <= duplication <= high:
        raise ValueError(f"duplication must be in [{low}, {high}]")
    pairs = []
    for record in corpus:
        label = record.class_label
        if label is None:
            continue
        repeats = duplication if record.editorial else 1
        pairs.extend([(record, label)] * repeats)
    return pairs


def recent_window(
    corpus: Sequence[EmailRecord],
    days: int = DEFAULT_ACTION_WINDOW_DAYS,
) -> list[EmailRecord]:
    """Messages from the last ``days`` days present in the corpus."""

    if days < 1:
        raise ValueError("window must cover at least one day")
    dated = [record.day for record in corpus if record.day is not None]
    if not dated:
        return []
    first = max(dated) - timedelta(days=days - 1)
    return [
        record
        for record in corpus
        if record.day is not None and record.day >= first
    ]


def sender_examples(
    corpus: Iterable[EmailRecord],
    seed: int,
) -> list[tuple[EmailRecord, int]]:
    """One example per sender labeled by its majority gold label, with the
    larger class downsampled to the size of the smaller one.

    Senders whose known labels tie are left out.
    """

    by_sender: dict[str, list[EmailRecord]] = defaultdict(list)
    for record in sorted(corpus, key=lambda r: r.message_id):
        if record.class_label is not None:
            by_sender[record.sender_address].append(record)
    grouped: dict[int, list[tuple[EmailRecord, int]]] = {0: [], 1: []}
    for address in sorted(by_sender):
        records = by_sender[address]
        votes = Counter(record.class_label for record in records)
        if votes[1] == votes[0]:
            continue
        label = 1 if votes[1] > votes[0] else 0
        grouped[label].append((records[0], label))
    size = min(len(grouped[0]), len(grouped[1]))
    rng = random.Random(seed)
    balanced = []
    for label in (0, 1):
        chosen = sorted(rng.sample(range(len(grouped[label])), size))
        balanced.extend(grouped[label][index] for index in chosen)
    return sorted(balanced, key=lambda pair: pair[0].message_id)


def assemble_training_sets(
    corpus: Sequence[EmailRecord],
    *,
    action_window_days: int = DEFAULT_ACTION_WINDOW_DAYS,
    duplication: int = DEFAULT_DUPLICATION,
    seed: int = 0,
) -> TrainingSets:
    """Build the four sub-model training sets from a deduplicated corpus."""

    content = _checked("content", gold_labeled(corpus, duplication))
    salutation = _checked(
        "salutation",
        [
            (
                record,
                int(detect_salutation(record.body, record.recipient_names)),
            )
            for record in content.records
        ],
    )
    window = recent_window(corpus, action_window_days)
    by_id = {record.message_id: record for record in window}
    action = _checked(
        "action",
        [
            (by_id[message_id], label)
            for message_id, label in build_action_labels(window)
        ],
    )
    sender = _checked("sender", sender_examples(corpus, seed))
    sets = TrainingSets(content, sender, action, salutation)
    for name, training_set in sets.as_dict().items():
        counts = training_set.class_counts()
        logger.info(
            "%s set: %d examples (%d positive, %d negative)",
            name,
            len(training_set),
            counts[1],
            counts[0],
        )
    return sets
