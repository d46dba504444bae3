"""Loading and serving the human/machine classifier."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

from fastapi import HTTPException, Request, status

from models import ModelGraph, load_model
from pipeline.inference import check_vocabularies, score_messages
from preprocessing.encoding import MessageLike, SequenceSpec, VocabularySet

from .config import Settings, get_settings

logger = logging.getLogger(__name__)


@dataclass
class Classifier:
    """A loaded checkpoint with the vocabularies it was trained on."""

    model: ModelGraph
    vocabs: VocabularySet
    spec: SequenceSpec
    threads: int = 1
    chunk_size: int = 256

    @property
    def kind(self) -> str:
        return self.model.kind

    def classify(self, messages: Sequence[MessageLike]) -> list[float]:
        scores = score_messages(
            self.model,
            messages,
            self.vocabs,
            spec=self.spec,
            threads=self.threads,
            chunk_size=self.chunk_size,
        )
        return [float(score) for score in scores]


async def get_classifier(request: Request) -> Classifier:
    """Return the classifier loaded at startup from application state."""

    classifier = getattr(request.app.state, "classifier", None)
    if classifier is None:
        raise HTTPException(
            status_code=status.HTTP_503_SERVICE_UNAVAILABLE,
            detail="Classifier not loaded.",
        )
    return classifier


def create_classifier(settings: Settings | None = None) -> Classifier | None:
    """Load the configured checkpoint, or ``None`` when none is configured."""

    settings = settings or get_settings()
    if settings.checkpoint_path is None or settings.vocab_dir is None:
        logger.warning("No checkpoint configured; /classify will return 503")
        return None
    model = load_model(settings.checkpoint_path)
    vocabs = VocabularySet.load(settings.vocab_dir)
    check_vocabularies(model, vocabs)
    return Classifier(
        model=model,
        vocabs=vocabs,
        spec=settings.inference_spec(),
        threads=settings.predict_threads,
        chunk_size=settings.predict_chunk_size,
    )
