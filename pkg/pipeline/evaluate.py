"""Adjusted evaluation of a scoring model against a sampling model."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from evaluation import (
    JudgedSample,
    SampleSizeError,
    SamplingPlan,
    ScoredPopulation,
    adjusted_metrics,
    confusion_from_judged,
    recall_at_precision,
    sampling_ratios,
    stratified_sample,
    unadjusted_metrics,
)
from models import load_model
from preprocessing.encoding import SequenceSpec, VocabularySet
from preprocessing.records import EmailRecord

from .errors import DataError
from .inference import INFERENCE_SPEC, score_messages

logger = logging.getLogger(__name__)

DEFAULT_TARGETS = (0.90, 0.96)
DEFAULT_THRESHOLD = 0.5


def target_key(target: float) -> str:
    return f"{target:.2f}"


def evaluate_population(
    population: ScoredPopulation,
    plan: SamplingPlan,
    *,
    targets: Sequence[float] = DEFAULT_TARGETS,
    threshold_f: float = DEFAULT_THRESHOLD,
    seed: int = 0,
) -> tuple[dict[str, Any], list[JudgedSample]]:
    """Sample, judge against the gold labels and compute the report values."""

    try:
        judged = stratified_sample(population, plan, seed)
    except SampleSizeError as exc:
        raise DataError(str(exc)) from exc
    plan = judged.plan
    group_plus, group_minus = population.groups(plan.cutoff_s)
    r, r_prime = sampling_ratios(plan, (len(group_plus), len(group_minus)))
    confusion = confusion_from_judged(judged.samples, threshold_f, plan.beta)
    precision, recall = adjusted_metrics(confusion)
    raw_precision, raw_recall = unadjusted_metrics(confusion)
    values: dict[str, Any] = {
        "beta": plan.beta,
        "k_ratio": plan.k_ratio,
        "cutoff_s": plan.cutoff_s,
        "threshold_f": threshold_f,
        "sampling": {
            "group_plus": len(group_plus),
            "group_minus": len(group_minus),
            "m_plus": plan.m_plus,
            "m_minus": plan.m_minus,
            "r": r,
            "r_prime": r_prime,
            "judged_human": sum(s.gold_label for s in judged.samples),
        },
        "adjusted": {"precision": precision, "recall": recall},
        "unadjusted": {"precision": raw_precision, "recall": raw_recall},
        "recall_at_precision": {},
        "sweep_threshold": {},
    }
    has_human = any(sample.gold_label == 1 for sample in judged.samples)
    for target in targets:
        key = target_key(target)
        if has_human:
            recall_at, threshold = recall_at_precision(
                judged.samples, target, plan.beta
            )
        else:
            recall_at, threshold = None, None
        values["recall_at_precision"][key] = recall_at
        values["sweep_threshold"][key] = threshold
    logger.info(
        "Evaluated %d judged samples, beta=%.4f, adjusted P=%s R=%s",
        len(judged.samples),
        plan.beta,
        precision,
        recall,
    )
    return values, list(judged.samples)


def gold_records(records: Iterable[EmailRecord]) -> list[EmailRecord]:
    known = [record for record in records if record.class_label is not None]
    if not known:
        raise DataError("no gold-labeled messages to evaluate")
    return known


def evaluate(
    checkpoint_s: Path,
    checkpoint_f: Path,
    records: Sequence[EmailRecord],
    vocabs: VocabularySet,
    plan: SamplingPlan,
    *,
    targets: Sequence[float] = DEFAULT_TARGETS,
    threshold_f: float = DEFAULT_THRESHOLD,
    seed: int = 0,
    spec: SequenceSpec = INFERENCE_SPEC,
    threads: int = 1,
) -> tuple[dict[str, Any], list[JudgedSample]]:
    """Score gold-labeled records with ψ_s and ψ_f, then run the adjusted
    evaluation of ψ_f.
    """

    known = gold_records(records)
    sampling_model = load_model(checkpoint_s)
    scoring_model = (
        sampling_model
        if checkpoint_f.resolve() == checkpoint_s.resolve()
        else load_model(checkpoint_f)
    )
    score_s = score_messages(
        sampling_model, known, vocabs, spec=spec, threads=threads
    )
    score_f = (
        score_s
        if scoring_model is sampling_model
        else score_messages(
            scoring_model, known, vocabs, spec=spec, threads=threads
        )
    )
    values, samples = evaluate_population(
        _population(known, score_s, score_f),
        plan,
        targets=targets,
        threshold_f=threshold_f,
        seed=seed,
    )
    values["models"] = {
        "sampling": sampling_model.kind,
        "scoring": scoring_model.kind,
    }
    return values, samples


def _population(
    known: Sequence[EmailRecord],
    score_s: np.ndarray,
    score_f: np.ndarray,
) -> ScoredPopulation:
    return ScoredPopulation(
        score_s=score_s,
        score_f=score_f,
        labels=np.array([r.class_label for r in known], dtype=np.int64),
        message_ids=tuple(record.message_id for record in known),
    )


def compare_models(
    checkpoint_s: Path,
    candidates: Mapping[str, Path],
    records: Sequence[EmailRecord],
    vocabs: VocabularySet,
    plan: SamplingPlan,
    *,
    content_lengths: Sequence[int],
    targets: Sequence[float] = DEFAULT_TARGETS,
    threshold_f: float = DEFAULT_THRESHOLD,
    seed: int = 0,
    spec: SequenceSpec = INFERENCE_SPEC,
    threads: int = 1,
) -> dict[str, Any]:
    """Adjusted P/R and R@P of each candidate at each content length.

    Every candidate is judged on the same sample, drawn once with ψ_s, so
    the rows differ only by the scoring model and its input length.
    """

    known = gold_records(records)
    score_s = score_messages(
        load_model(checkpoint_s), known, vocabs, spec=spec, threads=threads
    )
    rows: dict[str, Any] = {}
    for name, path in candidates.items():
        model = load_model(path)
        for length in content_lengths:
            score_f = score_messages(
                model,
                known,
                vocabs,
                spec=spec.for_inference(length),
                threads=threads,
            )
            values, _ = evaluate_population(
                _population(known, score_s, score_f),
                plan,
                targets=targets,
                threshold_f=threshold_f,
                seed=seed,
            )
            rows[f"{name}_{length}"] = {
                "model": model.kind,
                "content_length": length,
                "adjusted": values["adjusted"],
                "recall_at_precision": values["recall_at_precision"],
            }
            logger.info(
                "Compared %s at content length %d: adjusted P=%s R=%s",
                name,
                length,
                values["adjusted"]["precision"],
                values["adjusted"]["recall"],
            )
    return rows


def write_judged(path: Path, samples: Iterable[JudgedSample]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as file:
        for sample in samples:
            file.write(sample.model_dump_json() + "\n")


def read_judged(path: Path) -> list[JudgedSample]:
    with path.open("r", encoding="utf-8") as file:
        return [
            JudgedSample.model_validate_json(line)
            for line in file
            if line.strip()
        ]
