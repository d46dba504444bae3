"""Tests for the classify endpoint."""

from __future__ import annotations

import threading
from pathlib import Path
from typing import Iterator, Sequence

import pytest
from fastapi.testclient import TestClient

from app.classifier import Classifier, create_classifier, get_classifier
from app.config import Settings
from app.main import app
from models import build_salutation_model
from preprocessing.encoding import MessageLike
from preprocessing.vocabulary import VocabularyMismatchError

PAYLOAD = {
    "messages": [
        {
            "message_id": "a",
            "subject": "lunch",
            "body": "Hi Ana, lunch?",
            "sender_address": "bob@home.net",
        },
        {
            "message_id": "b",
            "subject": "weekly offer",
            "body": "Dear customer, deals inside",
            "sender_address": "deals@shop.example",
            "sender_name": "Shop Deals",
        },
    ]
}


class FakeClassifier:
    """Fixed scores in place of a loaded checkpoint."""

    kind = "fake"

    def __init__(self, scores: Sequence[float] = (0.93, 0.02)) -> None:
        self.scores = list(scores)

    def classify(self, messages: Sequence[MessageLike]) -> list[float]:
        return self.scores[: len(messages)]


class MismatchedClassifier(FakeClassifier):
    def classify(self, messages: Sequence[MessageLike]) -> list[float]:
        raise VocabularyMismatchError("vocabulary for 'content' differs")


@pytest.fixture
def test_client() -> Iterator[TestClient]:
    """Provide a TestClient with the classifier dependency overridden."""

    async def dependency_override() -> FakeClassifier:
        return FakeClassifier()

    app.dependency_overrides[get_classifier] = dependency_override
    with TestClient(app) as client:
        yield client
    app.dependency_overrides.clear()


def test_classify_returns_scores(test_client: TestClient) -> None:
    response = test_client.post("/classify", json=PAYLOAD)

    assert response.status_code == 200
    payload = response.json()
    assert payload["model"] == "fake"
    assert [r["message_id"] for r in payload["results"]] == ["a", "b"]
    assert payload["results"][0]["p_human"] == pytest.approx(0.93)
    assert payload["results"][0]["label"] == "human"
    assert payload["results"][1]["label"] == "machine"


def test_classify_rejects_empty_request(test_client: TestClient) -> None:
    response = test_client.post("/classify", json={"messages": []})
    assert response.status_code == 422


def test_vocabulary_mismatch_is_unprocessable() -> None:
    async def dependency_override() -> FakeClassifier:
        return MismatchedClassifier()

    app.dependency_overrides[get_classifier] = dependency_override
    try:
        with TestClient(app) as client:
            response = client.post("/classify", json=PAYLOAD)
    finally:
        app.dependency_overrides.clear()
    assert response.status_code == 422
    assert "content" in response.json()["detail"]


def test_classify_runs_off_the_event_loop() -> None:
    threads: dict[str, int] = {}

    class ThreadRecordingClassifier(FakeClassifier):
        def classify(self, messages: Sequence[MessageLike]) -> list[float]:
            threads["classify"] = threading.get_ident()
            return super().classify(messages)

    async def dependency_override() -> FakeClassifier:
        threads["loop"] = threading.get_ident()
        return ThreadRecordingClassifier()

    app.dependency_overrides[get_classifier] = dependency_override
    try:
        with TestClient(app) as client:
            response = client.post("/classify", json=PAYLOAD)
    finally:
        app.dependency_overrides.clear()
    assert response.status_code == 200
    assert threads["classify"] != threads["loop"]


def test_unloaded_classifier_returns_503() -> None:
    with TestClient(app) as client:
        health = client.get("/health")
        response = client.post("/classify", json=PAYLOAD)
    assert health.json() == {"status": "ok", "model": "unloaded"}
    assert response.status_code == 503


def test_create_classifier_loads_checkpoint(
    tmp_path: Path, tiny_messages, tiny_vocabs
) -> None:
    model = build_salutation_model(tiny_vocabs.salutation, e=8, filters=4)
    model.save(tmp_path / "salutation.hmck")
    tiny_vocabs.save(tmp_path / "vocab")
    settings = Settings(
        checkpoint_path=tmp_path / "salutation.hmck",
        vocab_dir=tmp_path / "vocab",
        salutation_length=6,
    )
    classifier = create_classifier(settings)
    assert isinstance(classifier, Classifier)
    assert classifier.kind == "salutation"
    scores = classifier.classify(tiny_messages)
    assert len(scores) == 8
    assert all(0.0 <= score <= 1.0 for score in scores)
    assert create_classifier(Settings(checkpoint_path=None)) is None
