from __future__ import annotations

import logging

import numpy as np
import pytest

from evaluation import (
    AdjustedConfusion,
    JudgedSample,
    SampleSizeError,
    SamplingPlan,
    ScoredPopulation,
    adjusted_metrics,
    confusion_from_judged,
    sampling_ratios,
    stratified_sample,
    unadjusted_metrics,
)


def _build_confusion(**overrides: float) -> AdjustedConfusion:
    counts = {
        "pos_sp_fp": 40,
        "pos_sp_fn": 5,
        "pos_sn_fp": 3,
        "pos_sn_fn": 7,
        "neg_sp_fp": 6,
        "neg_sp_fn": 20,
        "neg_sn_fp": 2,
        "neg_sn_fn": 90,
    }
    counts.update(overrides)
    return AdjustedConfusion(**counts)


def _build_population() -> ScoredPopulation:
    score_s = np.array([0.9, 0.8, 0.7, 0.6, 0.4, 0.3, 0.2, 0.1, 0.05, 0.01])
    score_f = np.array([0.95, 0.2, 0.9, 0.6, 0.7, 0.1, 0.3, 0.2, 0.9, 0.05])
    labels = np.array([1, 0, 1, 1, 1, 0, 0, 0, 0, 0])
    return ScoredPopulation(score_s, score_f, labels)


def test_adjusted_metrics_hand_computed() -> None:
    confusion = _build_confusion(beta=4.0)
    precision, recall = adjusted_metrics(confusion)
    assert precision == pytest.approx((40 + 4 * 3) / (40 + 4 * 3 + 6 + 4 * 2))
    assert recall == pytest.approx((40 + 4 * 3) / (40 + 4 * 3 + 5 + 4 * 7))
    assert confusion.total == 173


def test_beta_one_matches_unadjusted() -> None:
    confusion = _build_confusion()
    adjusted = adjusted_metrics(confusion)
    unadjusted = unadjusted_metrics(confusion)
    assert adjusted[0] == pytest.approx(unadjusted[0], abs=1e-12)
    assert adjusted[1] == pytest.approx(unadjusted[1], abs=1e-12)


def test_sampling_equal_to_scoring_keeps_precision() -> None:
    confusion = _build_confusion(pos_sn_fp=0, neg_sn_fp=0, beta=7.5)
    assert adjusted_metrics(confusion)[0] == pytest.approx(
        unadjusted_metrics(confusion)[0]
    )


def test_undefined_metrics_are_none() -> None:
    empty = AdjustedConfusion()
    assert adjusted_metrics(empty) == (None, None)
    no_predictions = AdjustedConfusion(pos_sp_fn=3, neg_sn_fn=4, beta=2.0)
    precision, recall = adjusted_metrics(no_predictions)
    assert precision is None
    assert recall == 0.0


def test_confusion_validates_counts_and_beta() -> None:
    with pytest.raises(ValueError):
        AdjustedConfusion(pos_sp_fp=-1)
    with pytest.raises(ValueError):
        AdjustedConfusion(beta=0.0)


def test_confusion_from_judged_counts_every_sample() -> None:
    samples = [
        JudgedSample(
            message_id="a", score_s=0.9, score_f=0.8, gold_label=1, group="s+"
        ),
        JudgedSample(
            message_id="b", score_s=0.1, score_f=0.5, gold_label=0, group="s-"
        ),
        JudgedSample(
            message_id="c", score_s=0.2, score_f=0.4, gold_label=1, group="s-"
        ),
    ]
    confusion = confusion_from_judged(samples, threshold_f=0.5, beta=3.0)
    assert confusion.pos_sp_fp == 1
    assert confusion.neg_sn_fp == 1
    assert confusion.pos_sn_fn == 1
    assert confusion.total == len(samples)
    assert confusion.beta == 3.0


def test_judged_sample_rejects_bad_values() -> None:
    with pytest.raises(ValueError):
        JudgedSample(
            message_id="a", score_s=1.5, score_f=0.5, gold_label=1, group="s+"
        )
    with pytest.raises(ValueError):
        JudgedSample(
            message_id="a", score_s=0.5, score_f=0.5, gold_label=1, group="s"
        )


def test_exhaustive_plan_recovers_population_metrics() -> None:
    population = _build_population()
    plan = SamplingPlan(cutoff_s=0.5, m_plus=4, m_minus=6)
    judged = stratified_sample(population, plan, seed=0)
    assert judged.beta == pytest.approx(1.0)
    assert len(judged.samples) == 10
    assert [s.group for s in judged.samples] == ["s+"] * 4 + ["s-"] * 6
    confusion = confusion_from_judged(judged.samples, 0.5, judged.beta)
    assert adjusted_metrics(confusion) == pytest.approx((4 / 5, 1.0))


def test_sampling_is_seeded() -> None:
    population = _build_population()
    plan = SamplingPlan(cutoff_s=0.5, m_plus=2, m_minus=3)
    first = stratified_sample(population, plan, seed=11)
    second = stratified_sample(population, plan, seed=11)
    assert first.samples == second.samples
    assert first.plan.k_ratio == pytest.approx(6 / 4)
    assert first.beta == pytest.approx(2 / 3 * 6 / 4)


def test_sample_larger_than_group_is_an_error() -> None:
    plan = SamplingPlan(cutoff_s=0.5, m_plus=5, m_minus=1)
    with pytest.raises(SampleSizeError):
        stratified_sample(_build_population(), plan, seed=0)
    with pytest.raises(ValueError):
        SamplingPlan(cutoff_s=0.5, m_plus=0, m_minus=1)
    with pytest.raises(ValueError):
        SamplingPlan(cutoff_s=0.5, m_plus=1, m_minus=1, k_ratio=0.0)


def test_sampling_ratios_give_beta() -> None:
    plan = SamplingPlan(cutoff_s=0.5, m_plus=50, m_minus=40, k_ratio=8.0)
    r, r_prime = sampling_ratios(plan, (100, 800))
    assert r / r_prime == pytest.approx(plan.beta)


def test_beta_outside_typical_range_is_logged(caplog) -> None:
    population = _build_population()
    plan = SamplingPlan(cutoff_s=0.5, m_plus=4, m_minus=1)
    with caplog.at_level(logging.WARNING, logger="evaluation.sampling"):
        judged = stratified_sample(population, plan, seed=0)
    assert judged.beta == pytest.approx(6.0)
    assert not [r for r in caplog.records if r.levelno >= logging.WARNING]
    plan = SamplingPlan(cutoff_s=0.5, m_plus=1, m_minus=6)
    with caplog.at_level(logging.WARNING, logger="evaluation.sampling"):
        stratified_sample(population, plan, seed=0)
    assert "outside the typical range" in caplog.text
