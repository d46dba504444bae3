"""Stratified oversampling of a scored population for editorial judging."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

logger = logging.getLogger(__name__)

BETA_RANGE = (1.0, 10.0)

Group = Literal["s+", "s-"]


class JudgedSample(BaseModel):
    """One editorially judged message with both model scores."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    message_id: str
    score_s: float = Field(ge=0.0, le=1.0)
    score_f: float = Field(ge=0.0, le=1.0)
    gold_label: int = Field(ge=0, le=1)
    group: Group


@dataclass(frozen=True)
class ScoredPopulation:
    """Gold labels with sampling-model and evaluated-model scores."""

    score_s: np.ndarray
    score_f: np.ndarray
    labels: np.ndarray
    message_ids: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        sizes = {len(self.score_s), len(self.score_f), len(self.labels)}
        if self.message_ids is not None:
            sizes.add(len(self.message_ids))
        if len(sizes) != 1:
            raise ValueError("population arrays must have equal length")

    def __len__(self) -> int:
        return len(self.labels)

    def message_id(self, index: int) -> str:
        if self.message_ids is None:
            return f"pop-{index:07d}"
        return self.message_ids[index]

    def groups(self, cutoff_s: float) -> tuple[np.ndarray, np.ndarray]:
        """Indices of G+ (``score_s >= cutoff_s``) and G-."""

        positive = np.asarray(self.score_s) >= cutoff_s
        return np.flatnonzero(positive), np.flatnonzero(~positive)


class SampleSizeError(ValueError):
    """A sampling plan asks for more messages than a group holds."""


@dataclass(frozen=True)
class SamplingPlan:
    """How many messages to judge from each side of the ``cutoff_s`` split.

    ``k_ratio`` is the group size ratio ``|G-| / |G+|``. Leave it unset to
    take it from the population being sampled.
    """

    cutoff_s: float
    m_plus: int
    m_minus: int
    k_ratio: float | None = None

    def __post_init__(self) -> None:
        if self.m_plus < 1 or self.m_minus < 1:
            raise ValueError("both groups need at least one sample")
        if self.k_ratio is not None and self.k_ratio <= 0:
            raise ValueError("k_ratio must be positive")

    def resolve(self, population: ScoredPopulation) -> SamplingPlan:
        group_plus, group_minus = population.groups(self.cutoff_s)
        if self.m_plus > len(group_plus) or self.m_minus > len(group_minus):
            raise SampleSizeError(
                f"plan asks for {self.m_plus}/{self.m_minus} samples but the "
                f"groups hold {len(group_plus)}/{len(group_minus)}"
            )
        if self.k_ratio is not None:
            return self
        return SamplingPlan(
            self.cutoff_s,
            self.m_plus,
            self.m_minus,
            len(group_minus) / len(group_plus),
        )

    @property
    def beta(self) -> float:
        """Weight of every s- sample, ``(M+ / M-) * k``."""

        if self.k_ratio is None:
            raise ValueError("k_ratio is unresolved")
        return self.m_plus / self.m_minus * self.k_ratio


def sampling_ratios(
    plan: SamplingPlan,
    group_sizes: tuple[int, int],
) -> tuple[float, float]:
    """Sampling rates ``(r, r')`` of G+ and G-; ``beta == r / r'``."""

    size_plus, size_minus = group_sizes
    if size_plus == 0 or size_minus == 0:
        raise ValueError("both groups must be non-empty")
    return plan.m_plus / size_plus, plan.m_minus / size_minus


def check_beta(beta: float) -> None:
    low, high = BETA_RANGE
    if not low <= beta <= high:
        logger.warning(
            "beta=%.4f is outside the typical range [%g, %g]", beta, low, high
        )


@dataclass(frozen=True)
class JudgedSet:
    samples: Sequence[JudgedSample]
    plan: SamplingPlan

    @property
    def beta(self) -> float:
        return self.plan.beta


def stratified_sample(
    population: ScoredPopulation,
    plan: SamplingPlan,
    seed: int,
) -> JudgedSet:
    """Draw ``m_plus`` from G+ and ``m_minus`` from G- without replacement."""

    plan = plan.resolve(population)
    group_plus, group_minus = population.groups(plan.cutoff_s)
    rng = np.random.default_rng(seed)
    chosen_plus = np.sort(rng.choice(group_plus, plan.m_plus, replace=False))
    chosen_minus = np.sort(
        rng.choice(group_minus, plan.m_minus, replace=False)
    )
    samples = [
        JudgedSample(
            message_id=population.message_id(int(index)),
            score_s=float(population.score_s[index]),
            score_f=float(population.score_f[index]),
            gold_label=int(population.labels[index]),
            group=group,
        )
        for group, chosen in (("s+", chosen_plus), ("s-", chosen_minus))
        for index in chosen
    ]
    logger.info(
        "Sampled %d from G+ (%d) and %d from G- (%d), beta=%.4f",
        plan.m_plus,
        len(group_plus),
        plan.m_minus,
        len(group_minus),
        plan.beta,
    )
    check_beta(plan.beta)
    return JudgedSet(samples, plan)
