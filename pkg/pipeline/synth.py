"""Generate a synthetic mailbox corpus with planted human/machine signals.

Human messages come from many individual senders with personal wording and
frequent salutations; machine messages come from a small pool of bulk
senders using template wording. Recipient actions are drawn per class so
that opened-not-deleted mail leans human and deleted-unopened mail leans
machine.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, fields
from datetime import date, timedelta
from typing import Iterator, List

from preprocessing.records import EmailRecord, GoldLabel

logger = logging.getLogger(__name__)

START_DAY = date(2024, 1, 1)

FIRST_NAMES: List[str] = [
    "alice", "bruno", "carla", "diego", "elena", "felipe", "gabriela",
    "hugo", "irene", "joao", "karina", "lucas", "marta", "nuno", "olivia",
    "paulo", "quenia", "rafael", "sofia", "tiago", "ursula", "vitor",
    "wanda", "xavier", "yara", "zeca",
]

LAST_NAMES: List[str] = [
    "almeida", "barbosa", "cardoso", "duarte", "esteves", "ferreira",
    "gomes", "henriques", "igreja", "jardim", "lopes", "moreira", "nogueira",
    "oliveira", "pereira", "queiroz", "ramos", "santos", "teixeira", "vieira",
]

FREEMAIL_DOMAINS: List[str] = [
    "mailbox.example", "post.example", "inbox.example", "home.example",
]

BRANDS: List[str] = [
    "shopmart", "flyaway", "newsdaily", "bankwise", "streamly", "gadgetzone",
    "fooddash", "travelhub", "fitclub", "bookworm", "cloudbox", "petcare",
]

BULK_LOCAL_PARTS: List[str] = [
    "noreply", "newsletter", "offers", "alerts", "updates", "no-reply",
]

HUMAN_SUBJECTS: List[str] = [
    "lunch tomorrow", "quick question", "photos from the weekend",
    "are you free on friday", "notes from our call", "dinner plans",
    "about the trip", "catching up", "can you review this", "happy birthday",
    "meeting moved", "thanks for yesterday",
]

MACHINE_SUBJECTS: List[str] = [
    "your order has shipped", "weekly deals inside", "your monthly statement",
    "limited time offer", "new sign in detected", "your receipt",
    "last chance to save", "recommended for you", "your subscription renews",
    "flash sale today only",
]

HUMAN_WORDS: List[str] = [
    "thanks", "see", "you", "soon", "hope", "doing", "well", "let", "me",
    "know", "think", "we", "could", "meet", "talk", "later", "miss", "kids",
    "family", "weekend", "call", "tomorrow", "coffee", "love", "cheers",
    "remember", "yesterday", "idea", "feel", "sorry", "friend", "together",
]

MACHINE_WORDS: List[str] = [
    "unsubscribe", "click", "here", "offer", "deal", "discount", "order",
    "account", "customer", "service", "terms", "privacy", "policy", "view",
    "browser", "shop", "now", "free", "shipping", "exclusive", "member",
    "rewards", "points", "manage", "preferences", "copyright", "reserved",
]

NEUTRAL_WORDS: List[str] = [
    "the", "a", "and", "to", "of", "for", "on", "in", "with", "your", "our",
    "this", "that", "is", "are", "will", "be", "at", "from", "please",
    "update", "information", "time", "new", "today", "week", "details",
]


@dataclass(frozen=True)
class SynthSpec:
    """Size, class mix, behavioral coupling and salutation rates."""

    n_messages: int = 20000
    human_fraction: float = 0.05
    seed: int = 0
    n_days: int = 14
    bulk_senders: int = 40
    human_open_not_deleted: float = 0.7
    human_deleted_not_opened: float = 0.05
    machine_open_not_deleted: float = 0.15
    machine_deleted_not_opened: float = 0.45
    human_salutation_rate: float = 0.6
    machine_salutation_rate: float = 0.1
    unknown_rate: float = 0.22
    ambiguous_rate: float = 0.1
    editorial_rate: float = 0.3

    def __post_init__(self) -> None:
        if self.n_messages < 0:
            raise ValueError("n_messages must be non-negative")
        if self.n_days < 1 or self.bulk_senders < 1:
            raise ValueError("n_days and bulk_senders must be positive")
        for spec_field in fields(self):
            if spec_field.type == "float":
                value = getattr(self, spec_field.name)
                if not 0.0 <= value <= 1.0:
                    raise ValueError(
                        f"{spec_field.name} must be in [0, 1], got {value}"
                    )
        for prefix in ("human", "machine"):
            total = getattr(self, f"{prefix}_open_not_deleted") + getattr(
                self, f"{prefix}_deleted_not_opened"
            )
            if total > 1.0:
                raise ValueError(f"{prefix} action probabilities exceed 1")


def _words(rng: random.Random, pool: List[str], count: int) -> List[str]:
    return [rng.choice(pool) for _ in range(count)]


def _human_sender(rng: random.Random, index: int) -> tuple[str, str]:
    first = rng.choice(FIRST_NAMES)
    last = rng.choice(LAST_NAMES)
    domain = rng.choice(FREEMAIL_DOMAINS)
    return f"{first}.{last}{index}@{domain}", f"{first} {last}".title()


def _bulk_sender(rng: random.Random) -> tuple[str, str]:
    brand = rng.choice(BRANDS)
    local = rng.choice(BULK_LOCAL_PARTS)
    return f"{local}@{brand}.example", f"{brand.title()} Team"


def _actions(
    rng: random.Random,
    open_not_deleted: float,
    deleted_not_opened: float,
) -> tuple[bool, bool]:
    """Return ``(opened, deleted)``; the remainder splits between both and
    neither.
    """

    roll = rng.random()
    if roll < open_not_deleted:
        return True, False
    if roll < open_not_deleted + deleted_not_opened:
        return False, True
    return (True, True) if rng.random() < 0.5 else (False, False)


def _body(
    rng: random.Random,
    pool: List[str],
    length: int,
    greeting: str | None,
    ambiguous: bool,
) -> str:
    words = _words(rng, NEUTRAL_WORDS if ambiguous else pool, length)
    words += _words(rng, NEUTRAL_WORDS, length // 2)
    rng.shuffle(words)
    text = " ".join(words)
    if greeting:
        return f"{greeting}, {text}"
    return text


def generate_records(spec: SynthSpec) -> Iterator[EmailRecord]:
    """Yield ``spec.n_messages`` records in message-id order."""

    rng = random.Random(spec.seed)
    expected_humans = max(1, int(spec.n_messages * spec.human_fraction))
    human_senders = [
        _human_sender(rng, index)
        for index in range(max(10, expected_humans // 2))
    ]
    bulk_senders = list(
        dict.fromkeys(_bulk_sender(rng) for _ in range(spec.bulk_senders))
    )
    # Zipf-like volume: a few bulk senders send most machine mail.
    bulk_weights = [1.0 / (rank + 1) for rank in range(len(bulk_senders))]

    for counter in range(spec.n_messages):
        is_human = rng.random() < spec.human_fraction
        ambiguous = rng.random() < spec.ambiguous_rate
        recipient = rng.choice(FIRST_NAMES)
        if is_human:
            address, name = rng.choice(human_senders)
            subject = rng.choice(HUMAN_SUBJECTS)
            greets = rng.random() < spec.human_salutation_rate
            greeting = rng.choice(["hi", "hey", "dear"]) + f" {recipient}"
            body = _body(
                rng,
                HUMAN_WORDS,
                rng.randint(10, 40),
                greeting if greets else None,
                ambiguous,
            )
            opened, deleted = _actions(
                rng,
                spec.human_open_not_deleted,
                spec.human_deleted_not_opened,
            )
        else:
            address, name = rng.choices(bulk_senders, bulk_weights)[0]
            subject = rng.choice(MACHINE_SUBJECTS)
            greets = rng.random() < spec.machine_salutation_rate
            greeting = f"dear {recipient}"
            body = _body(
                rng,
                MACHINE_WORDS,
                rng.randint(20, 80),
                greeting if greets else None,
                ambiguous,
            )
            opened, deleted = _actions(
                rng,
                spec.machine_open_not_deleted,
                spec.machine_deleted_not_opened,
            )
        gold = GoldLabel.HUMAN if is_human else GoldLabel.MACHINE
        if rng.random() < spec.unknown_rate:
            gold = GoldLabel.UNKNOWN
        editorial = (
            ambiguous
            and gold is not GoldLabel.UNKNOWN
            and rng.random() < spec.editorial_rate
        )
        yield EmailRecord(
            message_id=f"msg-{counter:07d}",
            sender_address=address,
            sender_name=name,
            subject=subject,
            body=body,
            recipient_names=(recipient.title(),),
            opened=opened,
            deleted=deleted,
            day=START_DAY + timedelta(days=rng.randrange(spec.n_days)),
            gold_label=gold,
            editorial=editorial,
        )


def generate_corpus(spec: SynthSpec) -> list[EmailRecord]:
    records = list(generate_records(spec))
    humans = sum(1 for r in records if r.gold_label is GoldLabel.HUMAN)
    logger.info(
        "Generated %d synthetic messages (%d human, seed %d)",
        len(records),
        humans,
        spec.seed,
    )
    return records
