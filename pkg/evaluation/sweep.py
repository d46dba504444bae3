"""Threshold sweeps over judged samples and recall at a fixed precision."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .sampling import JudgedSample


@dataclass(frozen=True)
class Sweep:
    """Adjusted precision and recall at every distinct score, descending."""

    thresholds: np.ndarray
    precision: np.ndarray
    recall: np.ndarray


def _arrays(
    samples: Sequence[JudgedSample],
    beta: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    scores = np.array([sample.score_f for sample in samples], dtype=np.float64)
    labels = np.array([sample.gold_label for sample in samples], dtype=np.int64)
    weights = np.array(
        [1.0 if sample.group == "s+" else beta for sample in samples],
        dtype=np.float64,
    )
    return scores, labels, weights


def threshold_sweep(samples: Sequence[JudgedSample], beta: float) -> Sweep:
    """Predict human when ``score_f >= t`` for each distinct ``t``."""

    if beta <= 0:
        raise ValueError("beta must be positive")
    scores, labels, weights = _arrays(samples, beta)
    positive_weight = float(np.sum(weights[labels == 1]))
    if positive_weight == 0:
        raise ValueError("the judged set has no human samples")
    order = np.argsort(-scores, kind="stable")
    scores = scores[order]
    true_positive = np.cumsum(np.where(labels[order] == 1, weights[order], 0))
    false_positive = np.cumsum(np.where(labels[order] == 0, weights[order], 0))
    # Last position of each run of equal scores.
    ends = np.flatnonzero(np.append(scores[1:] != scores[:-1], True))
    true_positive = true_positive[ends]
    predicted = true_positive + false_positive[ends]
    return Sweep(
        thresholds=scores[ends],
        precision=true_positive / predicted,
        recall=true_positive / positive_weight,
    )


def recall_at_precision(
    samples: Sequence[JudgedSample],
    target_precision: float,
    beta: float = 1.0,
) -> tuple[float, float | None]:
    """Highest adjusted recall whose adjusted precision reaches the target.

    Returns ``(recall, threshold)``, taking the lowest threshold that attains
    that recall, or ``(0.0, None)`` when no threshold qualifies.
    """

    if not 0.0 <= target_precision <= 1.0:
        raise ValueError("target precision must be in [0, 1]")
    sweep = threshold_sweep(samples, beta)
    qualifying = np.flatnonzero(sweep.precision >= target_precision)
    if len(qualifying) == 0:
        return 0.0, None
    best = qualifying[np.argmax(sweep.recall[qualifying])]
    same_recall = qualifying[sweep.recall[qualifying] == sweep.recall[best]]
    index = int(same_recall[-1])
    return float(sweep.recall[index]), float(sweep.thresholds[index])
