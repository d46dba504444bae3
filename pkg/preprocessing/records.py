"""Message records shared by labeling, training and evaluation."""

from __future__ import annotations

from datetime import date
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

from pydantic import BaseModel, ConfigDict, Field


class GoldLabel(StrEnum):
    HUMAN = "human"
    MACHINE = "machine"
    UNKNOWN = "unknown"


HUMAN = 1
MACHINE = 0


class EmailRecord(BaseModel):
    """One message with its sender, text, recipient actions and gold label."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    message_id: str = Field(..., min_length=1, description="Unique id.")
    sender_address: str = Field(..., description="Sender email address.")
    sender_name: str = Field(default="", description="Sender display name.")
    subject: str = Field(default="", description="Subject line.")
    body: str = Field(default="", description="Extracted plain-text body.")
    recipient_names: tuple[str, ...] = Field(
        default=(),
        description="Display names of the mailbox owners receiving it.",
    )
    opened: bool = Field(..., description="Recipient opened the message.")
    deleted: bool = Field(..., description="Recipient deleted the message.")
    day: date | None = Field(
        default=None,
        description="Delivery day, required for dedup and sampling.",
    )
    gold_label: GoldLabel | None = Field(
        default=None,
        description="Editorial human/machine/unknown judgement.",
    )
    editorial: bool = Field(
        default=False,
        description="Hard example judged by editors; duplicated in training.",
    )

    @property
    def class_label(self) -> int | None:
        """Return 1 for human, 0 for machine and ``None`` otherwise."""

        if self.gold_label is GoldLabel.HUMAN:
            return HUMAN
        if self.gold_label is GoldLabel.MACHINE:
            return MACHINE
        return None
