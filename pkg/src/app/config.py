"""Application and pipeline configuration."""

from __future__ import annotations

import json
from functools import lru_cache
from pathlib import Path
from typing import Any, Mapping

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from evaluation import SamplingPlan
from pipeline.synth import SynthSpec
from pipeline.training import ArchitectureConfig, TrainingConfig
from pipeline.vocabularies import VocabularySizes
from preprocessing.encoding import SequenceSpec

PRODUCTION_PRESET: dict[str, Any] = {
    "words_freq": 400_000,
    "words_chi": 400_000,
    "salutation_freq": 200_000,
    "salutation_chi": 200_000,
    "trigrams": 30_000,
    "names": 200_000,
}

PRESETS: dict[str, dict[str, Any]] = {
    "desk": {},
    "production": PRODUCTION_PRESET,
}


class Settings(BaseSettings):
    """Centralized settings for the CLI stages and the scoring service."""

    model_config = SettingsConfigDict(
        env_prefix="",
        env_file=".env",
        extra="ignore",
        populate_by_name=True,
    )

    seed: int = Field(
        default=0,
        alias="HM_SEED",
        ge=0,
        description="Seed for every random choice in the pipeline.",
    )
    log_level: str = Field(
        default="INFO",
        alias="HM_LOG_LEVEL",
        description="Logging level name.",
    )
    artifacts_dir: Path = Field(
        default=Path("artifacts"),
        alias="HM_ARTIFACTS_DIR",
        description="Root directory for corpora, vocabularies and models.",
    )

    subject_length: int = Field(default=30, alias="HM_SUBJECT_LENGTH", ge=1)
    content_length: int = Field(
        default=1000,
        alias="HM_CONTENT_LENGTH",
        ge=1,
        description="Body tokens seen during training.",
    )
    inference_content_length: int = Field(
        default=2000,
        alias="HM_INFERENCE_CONTENT_LENGTH",
        ge=1,
        description="Body tokens seen when scoring.",
    )
    address_length: int = Field(default=1000, alias="HM_ADDRESS_LENGTH", ge=1)
    name_length: int = Field(default=30, alias="HM_NAME_LENGTH", ge=1)
    salutation_length: int = Field(
        default=10, alias="HM_SALUTATION_LENGTH", ge=1
    )

    words_freq: int = Field(default=5000, alias="HM_WORDS_FREQ", ge=0)
    words_chi: int = Field(default=5000, alias="HM_WORDS_CHI", ge=0)
    salutation_freq: int = Field(
        default=2000, alias="HM_SALUTATION_FREQ", ge=0
    )
    salutation_chi: int = Field(default=2000, alias="HM_SALUTATION_CHI", ge=0)
    trigrams: int = Field(default=3000, alias="HM_TRIGRAMS", ge=1)
    names: int = Field(default=2000, alias="HM_NAMES", ge=1)

    word_embedding: int = Field(default=64, alias="HM_WORD_EMBEDDING", ge=1)
    sender_embedding: int = Field(
        default=64, alias="HM_SENDER_EMBEDDING", ge=1
    )
    salutation_embedding: int = Field(
        default=128, alias="HM_SALUTATION_EMBEDDING", ge=1
    )
    conv_filters: int = Field(default=128, alias="HM_CONV_FILTERS", ge=1)
    content_windows: int = Field(
        default=4, alias="HM_CONTENT_WINDOWS", ge=1, le=10
    )
    content_dropout: float = Field(
        default=0.4, alias="HM_CONTENT_DROPOUT", ge=0.0, lt=1.0
    )
    sender_dropout: float = Field(
        default=0.6, alias="HM_SENDER_DROPOUT", ge=0.0, lt=1.0
    )
    action_dropout: float = Field(
        default=0.4, alias="HM_ACTION_DROPOUT", ge=0.0, lt=1.0
    )
    salutation_dropout: float = Field(
        default=0.6, alias="HM_SALUTATION_DROPOUT", ge=0.0, lt=1.0
    )

    learning_rate: float = Field(default=1e-3, alias="HM_LEARNING_RATE", gt=0)
    adam_beta1: float = Field(default=0.9, alias="HM_ADAM_BETA1", ge=0, lt=1)
    adam_beta2: float = Field(
        default=0.999, alias="HM_ADAM_BETA2", ge=0, lt=1
    )
    adam_epsilon: float = Field(default=1e-8, alias="HM_ADAM_EPSILON", gt=0)
    batch_size: int = Field(default=128, alias="HM_BATCH_SIZE", ge=2)
    epochs: int = Field(default=3, alias="HM_EPOCHS", ge=1)
    validation_fraction: float = Field(
        default=0.1, alias="HM_VALIDATION_FRACTION", ge=0.0, lt=1.0
    )
    rectify_q: float = Field(
        default=0.99,
        alias="HM_RECTIFY_Q",
        ge=0.0,
        le=1.0,
        description="Rectification threshold for sub-model signals.",
    )

    per_day_cap: int = Field(
        default=5,
        alias="HM_PER_DAY_CAP",
        ge=1,
        description="Messages kept per sender and day.",
    )
    action_window_days: int = Field(
        default=3, alias="HM_ACTION_WINDOW_DAYS", ge=1
    )
    editorial_duplication: int = Field(
        default=10,
        alias="HM_EDITORIAL_DUPLICATION",
        ge=10,
        le=50,
        description="Copies of each editorial hard example in training.",
    )
    max_malformed_rate: float = Field(
        default=0.01, alias="HM_MAX_MALFORMED_RATE", ge=0.0, le=1.0
    )

    predict_threads: int = Field(default=1, alias="HM_PREDICT_THREADS", ge=1)
    predict_chunk_size: int = Field(
        default=256, alias="HM_PREDICT_CHUNK_SIZE", ge=1
    )

    synth_messages: int = Field(default=20000, alias="HM_SYNTH_MESSAGES", ge=0)
    synth_human_fraction: float = Field(
        default=0.05, alias="HM_SYNTH_HUMAN_FRACTION", ge=0.0, le=1.0
    )
    synth_unknown_rate: float = Field(
        default=0.22, alias="HM_SYNTH_UNKNOWN_RATE", ge=0.0, le=1.0
    )

    eval_cutoff_s: float = Field(
        default=0.5, alias="HM_EVAL_CUTOFF_S", ge=0.0, le=1.0
    )
    eval_m_plus: int = Field(default=500, alias="HM_EVAL_M_PLUS", ge=1)
    eval_m_minus: int = Field(default=500, alias="HM_EVAL_M_MINUS", ge=1)
    eval_targets: list[float] = Field(
        default=[0.90, 0.96],
        alias="HM_EVAL_TARGETS",
        description="Precision levels for recall-at-precision.",
    )

    checkpoint_path: Path | None = Field(
        default=None,
        alias="HM_CHECKPOINT_PATH",
        description="Checkpoint served by the scoring API.",
    )
    vocab_dir: Path | None = Field(
        default=None,
        alias="HM_VOCAB_DIR",
        description="Vocabulary directory matching the served checkpoint.",
    )

    def sequence_spec(self) -> SequenceSpec:
        return SequenceSpec(
            subject=self.subject_length,
            content=self.content_length,
            address=self.address_length,
            name=self.name_length,
            salutation=self.salutation_length,
        )

    def inference_spec(self) -> SequenceSpec:
        return self.sequence_spec().for_inference(
            self.inference_content_length
        )

    def vocabulary_sizes(self) -> VocabularySizes:
        return VocabularySizes(
            words_freq=self.words_freq,
            words_chi=self.words_chi,
            salutation_freq=self.salutation_freq,
            salutation_chi=self.salutation_chi,
            trigrams=self.trigrams,
            names=self.names,
        )

    def training_config(self) -> TrainingConfig:
        return TrainingConfig(
            learning_rate=self.learning_rate,
            beta1=self.adam_beta1,
            beta2=self.adam_beta2,
            epsilon=self.adam_epsilon,
            batch_size=self.batch_size,
            epochs=self.epochs,
            validation_fraction=self.validation_fraction,
            seed=self.seed,
        )

    def architecture_config(self) -> ArchitectureConfig:
        return ArchitectureConfig(
            word_embedding=self.word_embedding,
            sender_embedding=self.sender_embedding,
            salutation_embedding=self.salutation_embedding,
            filters=self.conv_filters,
            content_windows=self.content_windows,
            content_dropout=self.content_dropout,
            sender_dropout=self.sender_dropout,
            action_dropout=self.action_dropout,
            salutation_dropout=self.salutation_dropout,
            q=self.rectify_q,
        )

    def synth_spec(self) -> SynthSpec:
        return SynthSpec(
            n_messages=self.synth_messages,
            human_fraction=self.synth_human_fraction,
            unknown_rate=self.synth_unknown_rate,
            seed=self.seed,
        )

    def sampling_plan(self) -> SamplingPlan:
        return SamplingPlan(
            cutoff_s=self.eval_cutoff_s,
            m_plus=self.eval_m_plus,
            m_minus=self.eval_m_minus,
        )


def _field_name(key: str) -> str:
    """Accept either ``HM_EPOCHS`` or ``epochs``."""

    for name, field in Settings.model_fields.items():
        if key in (name, field.alias):
            return name
    return key.lower().removeprefix("hm_")


def _parse_value(raw: str) -> Any:
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def parse_overrides(pairs: list[str]) -> dict[str, Any]:
    """Turn ``KEY=VALUE`` strings into settings keyword arguments."""

    overrides: dict[str, Any] = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise ValueError(f"expected KEY=VALUE, got {pair!r}")
        overrides[_field_name(key.strip())] = _parse_value(value.strip())
    return overrides


def load_settings(
    env_file: Path | None = None,
    *,
    preset: str = "desk",
    overrides: Mapping[str, Any] | None = None,
) -> Settings:
    """Settings from the environment and ``env_file``, then the preset,
    then explicit overrides.
    """

    if preset not in PRESETS:
        raise ValueError(f"unknown preset {preset!r}")
    values = {**PRESETS[preset], **(overrides or {})}
    if env_file is not None and not env_file.is_file():
        raise FileNotFoundError(f"config file {env_file} does not exist")
    return Settings(_env_file=env_file, **values)


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Return cached settings instance."""

    return Settings()
