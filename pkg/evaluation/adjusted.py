"""Precision and recall corrected for oversampling of the ψ_s-positive group.

Samples the sampling model scored negative (group ``s-``) stand in for
``beta`` messages each. Counts are named ``<gold>_<group>_<prediction>``:
``pos_sn_fp`` is a human message from ``s-`` that the evaluated model
calls human.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .sampling import JudgedSample


@dataclass(frozen=True)
class AdjustedConfusion:
    pos_sp_fp: int = 0
    pos_sp_fn: int = 0
    pos_sn_fp: int = 0
    pos_sn_fn: int = 0
    neg_sp_fp: int = 0
    neg_sp_fn: int = 0
    neg_sn_fp: int = 0
    neg_sn_fn: int = 0
    beta: float = 1.0

    def __post_init__(self) -> None:
        if min(self.counts()) < 0:
            raise ValueError("confusion counts must be non-negative")
        if self.beta <= 0:
            raise ValueError("beta must be positive")

    def counts(self) -> tuple[int, ...]:
        return (
            self.pos_sp_fp,
            self.pos_sp_fn,
            self.pos_sn_fp,
            self.pos_sn_fn,
            self.neg_sp_fp,
            self.neg_sp_fn,
            self.neg_sn_fp,
            self.neg_sn_fn,
        )

    @property
    def total(self) -> int:
        return sum(self.counts())

    def weighted(self) -> tuple[float, float, float]:
        """Adjusted true positives, false positives and false negatives."""

        beta = self.beta
        true_positive = self.pos_sp_fp + beta * self.pos_sn_fp
        false_positive = self.neg_sp_fp + beta * self.neg_sn_fp
        false_negative = self.pos_sp_fn + beta * self.pos_sn_fn
        return true_positive, false_positive, false_negative


def _ratio(numerator: float, denominator: float) -> float | None:
    if denominator == 0:
        return None
    return numerator / denominator


def adjusted_metrics(
    confusion: AdjustedConfusion,
) -> tuple[float | None, float | None]:
    """Adjusted ``(precision, recall)``; ``None`` where undefined."""

    true_positive, false_positive, false_negative = confusion.weighted()
    return (
        _ratio(true_positive, true_positive + false_positive),
        _ratio(true_positive, true_positive + false_negative),
    )


def unadjusted_metrics(
    confusion: AdjustedConfusion,
) -> tuple[float | None, float | None]:
    """Precision and recall over the pooled counts, ignoring ``beta``."""

    true_positive = confusion.pos_sp_fp + confusion.pos_sn_fp
    false_positive = confusion.neg_sp_fp + confusion.neg_sn_fp
    false_negative = confusion.pos_sp_fn + confusion.pos_sn_fn
    return (
        _ratio(true_positive, true_positive + false_positive),
        _ratio(true_positive, true_positive + false_negative),
    )


def confusion_from_judged(
    samples: Iterable[JudgedSample],
    threshold_f: float,
    beta: float,
) -> AdjustedConfusion:
    """Count judged samples; ``score_f >= threshold_f`` predicts human."""

    counts = dict.fromkeys(
        (
            f"{gold}_{group}_{prediction}"
            for gold in ("pos", "neg")
            for group in ("sp", "sn")
            for prediction in ("fp", "fn")
        ),
        0,
    )
    for sample in samples:
        gold = "pos" if sample.gold_label == 1 else "neg"
        group = "sp" if sample.group == "s+" else "sn"
        prediction = "fp" if sample.score_f >= threshold_f else "fn"
        counts[f"{gold}_{group}_{prediction}"] += 1
    return AdjustedConfusion(**counts, beta=beta)
