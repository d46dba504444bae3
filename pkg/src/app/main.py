"""FastAPI application scoring messages as human or machine."""

from __future__ import annotations

from contextlib import asynccontextmanager

from fastapi import Depends, FastAPI, HTTPException, status

from preprocessing.vocabulary import VocabularyMismatchError

from .classifier import Classifier, create_classifier, get_classifier
from .config import get_settings
from .log import configure_logging
from .schemas import ClassifyRequest, ClassifyResponse


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Load the classifier when the application starts."""

    settings = get_settings()
    configure_logging(settings.log_level)
    app.state.classifier = create_classifier(settings)
    try:
        yield
    finally:
        app.state.classifier = None


app = FastAPI(title="Human/Machine Mail Classifier", lifespan=lifespan)


@app.get("/health", tags=["Health"])
async def health() -> dict[str, str]:
    """Return application health information."""

    classifier = getattr(app.state, "classifier", None)
    return {
        "status": "ok",
        "model": classifier.kind if classifier is not None else "unloaded",
    }


@app.post("/classify", response_model=ClassifyResponse, tags=["Classify"])
def classify(
    request: ClassifyRequest,
    classifier: Classifier = Depends(get_classifier),
) -> ClassifyResponse:
    """Score each message with the loaded model.

    Declared sync so FastAPI runs it in its threadpool, off the event loop.
    """

    try:
        scores = classifier.classify(request.messages)
    except VocabularyMismatchError as error:
        raise HTTPException(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            detail=str(error),
        ) from error
    return ClassifyResponse.from_scores(
        model=classifier.kind,
        message_ids=[message.message_id for message in request.messages],
        scores=scores,
    )
