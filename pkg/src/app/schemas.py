"""Pydantic models for API requests and responses."""

from __future__ import annotations

from typing import Iterable, List

from pydantic import BaseModel, Field

DECISION_THRESHOLD = 0.5


class Message(BaseModel):
    """A message to classify."""

    message_id: str = Field(..., min_length=1, description="Caller's id.")
    subject: str = Field(default="", description="Subject line.")
    body: str = Field(default="", description="Plain-text body.")
    sender_address: str = Field(..., description="Sender email address.")
    sender_name: str = Field(default="", description="Sender display name.")


class ClassifyRequest(BaseModel):
    messages: List[Message] = Field(
        ...,
        min_length=1,
        max_length=1000,
        description="Messages to score in one call.",
    )


class MessageScore(BaseModel):
    """Human probability and thresholded label for one message."""

    message_id: str = Field(..., description="Id from the request.")
    p_human: float = Field(
        ...,
        ge=0.0,
        le=1.0,
        description="Probability that a person wrote the message.",
    )
    label: str = Field(..., description="'human' or 'machine'.")

    @classmethod
    def from_probability(
        cls, message_id: str, p_human: float
    ) -> "MessageScore":
        label = "human" if p_human >= DECISION_THRESHOLD else "machine"
        return cls(message_id=message_id, p_human=p_human, label=label)


class ClassifyResponse(BaseModel):
    """Response envelope returned by the classify endpoint."""

    model: str = Field(..., description="Kind of the serving model.")
    results: List[MessageScore] = Field(
        default_factory=list,
        description="Scores in request order.",
    )

    @classmethod
    def from_scores(
        cls,
        model: str,
        message_ids: Iterable[str],
        scores: Iterable[float],
    ) -> "ClassifyResponse":
        results = [
            MessageScore.from_probability(message_id, score)
            for message_id, score in zip(message_ids, scores)
        ]
        return cls(model=model, results=results)
