"""Batch scoring with an order-preserving worker pool."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from models import ModelGraph, load_model, predict
from preprocessing.encoding import (
    MessageLike,
    SequenceSpec,
    VocabularySet,
    encode_inputs,
)
from preprocessing.records import EmailRecord
from preprocessing.vocabulary import VocabularyMismatchError

from .corpus import write_scores

logger = logging.getLogger(__name__)

DEFAULT_CHUNK_SIZE = 256
INFERENCE_SPEC = SequenceSpec().for_inference()


@dataclass(frozen=True)
class PredictReport:
    messages: int
    seconds: float

    @property
    def throughput(self) -> float:
        """Messages per second; zero when nothing was scored."""

        if self.messages == 0 or self.seconds <= 0:
            return 0.0
        return self.messages / self.seconds


def check_vocabularies(model: ModelGraph, vocabs: VocabularySet) -> None:
    hashes = vocabs.hashes()
    for input_name in model.input_names:
        expected = model.vocab_hashes.get(input_name)
        if expected is not None and hashes[input_name] != expected:
            raise VocabularyMismatchError(
                f"vocabulary for {input_name!r} does not match the one "
                f"{model.name} was trained with"
            )


def score_messages(
    model: ModelGraph,
    messages: Sequence[MessageLike],
    vocabs: VocabularySet,
    *,
    spec: SequenceSpec = INFERENCE_SPEC,
    threads: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> np.ndarray:
    """Probability of human per message, in input order.

    Chunks are fixed by ``chunk_size`` alone, so the thread count never
    changes the result.
    """

    if threads < 1 or chunk_size < 1:
        raise ValueError("threads and chunk_size must be positive")
    check_vocabularies(model, vocabs)
    chunks = [
        messages[start : start + chunk_size]
        for start in range(0, len(messages), chunk_size)
    ]

    def score(chunk: Sequence[MessageLike]) -> np.ndarray:
        batch = encode_inputs(chunk, vocabs, spec, model.input_names)
        return predict(model, batch)

    if not chunks:
        return np.zeros(0)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return np.concatenate(list(pool.map(score, chunks)))


def predict_batch(
    checkpoint: Path,
    records: Sequence[EmailRecord],
    output_path: Path,
    vocabs: VocabularySet,
    *,
    spec: SequenceSpec = INFERENCE_SPEC,
    threads: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> PredictReport:
    """Score ``records`` with the checkpointed model and write
    ``message_id<TAB>p_human`` lines.
    """

    model = load_model(checkpoint)
    started = time.perf_counter()
    scores = score_messages(
        model,
        records,
        vocabs,
        spec=spec,
        threads=threads,
        chunk_size=chunk_size,
    )
    report = PredictReport(len(records), time.perf_counter() - started)
    write_scores(
        output_path,
        [(record.message_id, float(p)) for record, p in zip(records, scores)],
    )
    logger.info(
        "Scored %d messages with %s in %.2fs (%.1f messages/s, %d threads)",
        report.messages,
        model.kind,
        report.seconds,
        report.throughput,
        threads,
    )
    return report
