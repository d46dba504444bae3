"""Synthetic scored populations with known confusion counts.

Each message gets a latent Gaussian score per model, shifted up for human
messages; the reported score is the logistic of the latent minus the
model's threshold, so a score cutoff of 0.5 matches the latent threshold.
The sampling model's latent shares part of its noise with the evaluated
model's.
"""

from __future__ import annotations

from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from .sampling import ScoredPopulation

DECISION_CUTOFF = 0.5


def expit(x: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * x))


@dataclass(frozen=True)
class PopulationSpec:
    prior: float
    human_mean: float = 2.0
    threshold: float = 1.0
    sampling_mean: float | None = None
    sampling_threshold: float | None = None
    correlation: float = 0.6
    perfect_f: bool = False

    def __post_init__(self) -> None:
        if not 0.0 < self.prior < 1.0:
            raise ValueError("prior must be in (0, 1)")
        if not -1.0 <= self.correlation <= 1.0:
            raise ValueError("correlation must be in [-1, 1]")

    @classmethod
    def from_operating_point(
        cls,
        prior: float,
        precision: float,
        recall: float,
        **kwargs: float,
    ) -> PopulationSpec:
        """Place ψ_f so the 0.5 cutoff gives ``precision`` and ``recall``."""

        if not 0.0 < precision < 1.0 or not 0.0 < recall < 1.0:
            raise ValueError("precision and recall must be in (0, 1)")
        false_positive_rate = (
            prior * recall * (1.0 - precision) / (precision * (1.0 - prior))
        )
        if not 0.0 < false_positive_rate < 1.0:
            raise ValueError("operating point is not reachable at this prior")
        normal = NormalDist()
        threshold = normal.inv_cdf(1.0 - false_positive_rate)
        human_mean = threshold + normal.inv_cdf(recall)
        return cls(
            prior=prior,
            human_mean=human_mean,
            threshold=threshold,
            **kwargs,
        )

    def expected_metrics(self) -> tuple[float, float]:
        """Population ``(precision, recall)`` of ψ_f at the 0.5 cutoff."""

        if self.perfect_f:
            return 1.0, 1.0
        normal = NormalDist()
        recall = 1.0 - normal.cdf(self.threshold - self.human_mean)
        false_positive_rate = 1.0 - normal.cdf(self.threshold)
        true_positive = self.prior * recall
        false_positive = (1.0 - self.prior) * false_positive_rate
        return true_positive / (true_positive + false_positive), recall


def simulate_population(
    spec: PopulationSpec,
    size: int,
    seed: int,
) -> ScoredPopulation:
    """Draw ``size`` messages with exactly ``round(prior * size)`` humans."""

    if size < 2:
        raise ValueError("population needs at least two messages")
    rng = np.random.default_rng(seed)
    humans = int(round(spec.prior * size))
    labels = np.zeros(size, dtype=np.int64)
    labels[:humans] = 1
    labels = rng.permutation(labels)

    noise_f = rng.standard_normal(size)
    noise_s = rng.standard_normal(size)
    mixed = spec.correlation * noise_f + np.sqrt(
        1.0 - spec.correlation**2
    ) * noise_s
    sampling_mean = (
        spec.human_mean if spec.sampling_mean is None else spec.sampling_mean
    )
    sampling_threshold = (
        spec.threshold
        if spec.sampling_threshold is None
        else spec.sampling_threshold
    )
    latent_f = labels * spec.human_mean + noise_f
    latent_s = labels * sampling_mean + mixed
    if spec.perfect_f:
        score_f = labels.astype(np.float64)
    else:
        score_f = expit(latent_f - spec.threshold)
    return ScoredPopulation(
        score_s=expit(latent_s - sampling_threshold),
        score_f=score_f,
        labels=labels,
    )


def population_metrics(
    population: ScoredPopulation,
    threshold_f: float = DECISION_CUTOFF,
) -> tuple[float | None, float | None]:
    """Exact precision and recall of ψ_f over the whole population."""

    predicted = np.asarray(population.score_f) >= threshold_f
    labels = np.asarray(population.labels) == 1
    true_positive = int(np.sum(predicted & labels))
    predicted_total = int(np.sum(predicted))
    positive_total = int(np.sum(labels))
    precision = true_positive / predicted_total if predicted_total else None
    recall = true_positive / positive_total if positive_total else None
    return precision, recall


def population_counts(
    population: ScoredPopulation,
    cutoff_s: float = DECISION_CUTOFF,
) -> dict[tuple[int, int], int]:
    """``n[(gold, s)]`` with ``s = 1`` for messages in G+."""

    in_plus = np.asarray(population.score_s) >= cutoff_s
    labels = np.asarray(population.labels)
    return {
        (gold, side): int(
            np.sum((labels == gold) & (in_plus == bool(side)))
        )
        for gold in (1, 0)
        for side in (1, 0)
    }
