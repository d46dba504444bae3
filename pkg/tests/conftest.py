from __future__ import annotations

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.append(str(ROOT))

import pytest  # noqa: E402

from preprocessing.encoding import SequenceSpec, VocabularySet  # noqa: E402
from preprocessing.records import EmailRecord, GoldLabel  # noqa: E402
from preprocessing.tokenize import (  # noqa: E402
    letter_trigrams,
    tokenize_words,
)
from preprocessing.vocabulary import (  # noqa: E402
    Vocabulary,
    VocabularyKind,
)

HUMAN_BODIES = [
    "Hi Ana, lunch tomorrow at noon?",
    "Hey Ana, can you call me back",
    "Ana, thanks for the notes from today",
    "Hi Ana, dinner with the kids on friday",
]
MACHINE_BODIES = [
    "Dear Ana, huge offer inside unsubscribe here",
    "Your order has shipped track your package",
    "Weekly digest top deals unsubscribe",
    "Dear customer, your receipt is attached",
]
SEPARABLE_HUMAN = [
    "lunch", "dinner", "kids", "call", "notes", "weekend", "coffee", "trip",
]
SEPARABLE_MACHINE = [
    "offer", "deal", "unsubscribe", "receipt", "shipped", "digest",
    "discount", "order",
]


def build_message(
    index: int,
    *,
    human: bool,
    body: str,
    sender: tuple[str, str] | None = None,
) -> EmailRecord:
    sender = sender or (
        ("bob@home.net", "Bob Stone")
        if human
        else ("deals@shop.example", "Shop Deals")
    )
    return EmailRecord(
        message_id=f"m{index:03d}",
        sender_address=sender[0],
        sender_name=sender[1],
        subject="quick question" if human else "weekly offer",
        body=body,
        recipient_names=("Ana Lima",),
        opened=human,
        deleted=not human,
        gold_label=GoldLabel.HUMAN if human else GoldLabel.MACHINE,
    )


@pytest.fixture
def tiny_messages() -> list[EmailRecord]:
    messages = [
        build_message(i, human=True, body=body)
        for i, body in enumerate(HUMAN_BODIES)
    ]
    messages.extend(
        build_message(len(HUMAN_BODIES) + i, human=False, body=body)
        for i, body in enumerate(MACHINE_BODIES)
    )
    return messages


def build_vocabs(messages: list[EmailRecord]) -> VocabularySet:
    words: list[str] = []
    trigrams: list[str] = []
    names: list[str] = []
    for message in messages:
        words.extend(tokenize_words(message.subject))
        words.extend(tokenize_words(message.body))
        trigrams.extend(letter_trigrams(message.sender_address))
        names.extend(tokenize_words(message.sender_name))
    return VocabularySet(
        words=Vocabulary.from_tokens(words, name="words"),
        trigrams=Vocabulary.from_tokens(
            trigrams, VocabularyKind.TRIGRAM, "trigrams"
        ),
        names=Vocabulary.from_tokens(names, name="names"),
        salutation=Vocabulary.from_tokens(
            ["hi", "hey", "dear", "ana", "customer"], name="salutation"
        ),
    )


@pytest.fixture
def tiny_spec() -> SequenceSpec:
    return SequenceSpec(subject=6, content=12, address=24, name=4, salutation=6)


@pytest.fixture
def tiny_vocabs(tiny_messages: list[EmailRecord]) -> VocabularySet:
    return build_vocabs(tiny_messages)


@pytest.fixture
def separable_messages() -> list[EmailRecord]:
    """32 messages whose class shows in every input: body words, sender
    address and name, and a greeting of the recipient.
    """

    messages = []
    for i in range(16):
        first = SEPARABLE_HUMAN[i % 8]
        second = SEPARABLE_HUMAN[(i + 3) % 8]
        messages.append(
            build_message(
                2 * i,
                human=True,
                body=f"Hi Ana, {first} {second} soon",
                sender=(f"bob{i}@home.net", "Bob Stone"),
            )
        )
        first = SEPARABLE_MACHINE[i % 8]
        second = SEPARABLE_MACHINE[(i + 5) % 8]
        messages.append(
            build_message(
                2 * i + 1,
                human=False,
                body=f"Your {first} {second} inside today",
                sender=(f"deals{i}@shop.example", "Shop Deals"),
            )
        )
    return messages


@pytest.fixture
def separable_vocabs(separable_messages: list[EmailRecord]) -> VocabularySet:
    return build_vocabs(separable_messages)
