"""Command-line surface: one verb per pipeline stage.

Exit codes: 0 success, 1 usage or configuration error, 2 data or
vocabulary error, 3 training divergence.
"""

from __future__ import annotations

import argparse
import logging
from pathlib import Path
from typing import Callable, Sequence

from pydantic import ValidationError

from app.config import Settings, load_settings, parse_overrides
from app.log import configure_logging
from nncore.checkpoint import CheckpointError
from preprocessing.encoding import VocabularySet
from preprocessing.records import EmailRecord
from preprocessing.vocabulary import VocabularyMismatchError
from preprocessing.weak_labels import (
    build_action_labels,
    build_salutation_labels,
    selectivity_report,
)

from .corpus import read_corpus, write_corpus, write_labels
from .errors import DataError, DivergenceError
from .evaluate import compare_models, evaluate, write_judged
from .inference import predict_batch
from .report import format_report, write_report
from .sampling import (
    TrainingSets,
    assemble_training_sets,
    dedup_and_cap,
    recent_window,
)
from .synth import generate_corpus
from .training import train_all
from .vocabularies import build_vocabularies

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_DIVERGED = 3


def _paths(settings: Settings) -> dict[str, Path]:
    root = settings.artifacts_dir
    return {
        "corpus": root / "corpus.jsonl",
        "vocab": root / "vocab",
        "labels": root / "labels",
        "checkpoints": root / "checkpoints",
        "scores": root / "scores.tsv",
        "reports": root / "reports",
    }


def _corpus(args: argparse.Namespace, settings: Settings) -> list[EmailRecord]:
    path = args.corpus or _paths(settings)["corpus"]
    return read_corpus(
        path, max_malformed_rate=settings.max_malformed_rate
    ).records


def _training_sets(
    args: argparse.Namespace,
    settings: Settings,
) -> TrainingSets:
    corpus = dedup_and_cap(_corpus(args, settings), settings.per_day_cap)
    return assemble_training_sets(
        corpus,
        action_window_days=settings.action_window_days,
        duplication=settings.editorial_duplication,
        seed=settings.seed,
    )


def cmd_gen_corpus(args: argparse.Namespace, settings: Settings) -> str:
    output = args.out or _paths(settings)["corpus"]
    count = write_corpus(output, generate_corpus(settings.synth_spec()))
    return f"Generated {count} messages at {output}"


def cmd_build_vocab(args: argparse.Namespace, settings: Settings) -> str:
    vocabs = build_vocabularies(
        _training_sets(args, settings),
        settings.vocabulary_sizes(),
        address_chars=settings.address_length,
    )
    output = args.out or _paths(settings)["vocab"]
    vocabs.save(output)
    sizes = ", ".join(
        f"{name}={getattr(vocabs, name).size}" for name in VocabularySet.FILES
    )
    return f"Wrote vocabularies ({sizes}) to {output}"


def cmd_gen_labels(args: argparse.Namespace, settings: Settings) -> str:
    corpus = dedup_and_cap(_corpus(args, settings), settings.per_day_cap)
    output = args.out or _paths(settings)["labels"]
    action = build_action_labels(
        recent_window(corpus, settings.action_window_days)
    )
    salutation = build_salutation_labels(corpus)
    write_labels(output / "action.tsv", action)
    write_labels(output / "salutation.tsv", salutation)
    return (
        f"Wrote {len(action)} action and {len(salutation)} salutation "
        f"labels to {output}"
    )


def cmd_assemble(args: argparse.Namespace, settings: Settings) -> str:
    sets = _training_sets(args, settings)
    values = {
        name: {
            "examples": len(training_set),
            "positive": training_set.class_counts()[1],
            "negative": training_set.class_counts()[0],
        }
        for name, training_set in sets.as_dict().items()
    }
    output = args.out or _paths(settings)["reports"] / "training_sets.txt"
    write_report(output, values)
    return f"Assembled {len(sets.as_dict())} training sets, summary at {output}"


def cmd_train(args: argparse.Namespace, settings: Settings) -> str:
    sets = _training_sets(args, settings)
    vocab_dir = args.vocab or _paths(settings)["vocab"]
    vocabs = VocabularySet.load(vocab_dir)
    output = args.out or _paths(settings)["checkpoints"]
    results = train_all(
        sets,
        vocabs,
        output,
        spec=settings.sequence_spec(),
        config=settings.training_config(),
        architecture=settings.architecture_config(),
    )
    return f"Trained {', '.join(results)} into {output}"


def cmd_predict(args: argparse.Namespace, settings: Settings) -> str:
    checkpoint = (
        args.checkpoint or _paths(settings)["checkpoints"] / "full.hmck"
    )
    vocabs = VocabularySet.load(args.vocab or _paths(settings)["vocab"])
    output = args.out or _paths(settings)["scores"]
    report = predict_batch(
        checkpoint,
        _corpus(args, settings),
        output,
        vocabs,
        spec=settings.inference_spec(),
        threads=settings.predict_threads,
        chunk_size=settings.predict_chunk_size,
    )
    return (
        f"Scored {report.messages} messages into {output} "
        f"({report.throughput:.1f} messages/s)"
    )


def cmd_evaluate(args: argparse.Namespace, settings: Settings) -> str:
    checkpoints = _paths(settings)["checkpoints"]
    checkpoint_f = args.checkpoint or checkpoints / "full.hmck"
    checkpoint_s = args.sampling_checkpoint or checkpoint_f
    records = _corpus(args, settings)
    vocabs = VocabularySet.load(args.vocab or _paths(settings)["vocab"])
    values, samples = evaluate(
        checkpoint_s,
        checkpoint_f,
        records,
        vocabs,
        settings.sampling_plan(),
        targets=settings.eval_targets,
        seed=settings.seed,
        spec=settings.inference_spec(),
        threads=settings.predict_threads,
    )
    if args.compare:
        values["comparison"] = compare_models(
            checkpoint_s,
            {"content": checkpoints / "content.hmck", "full": checkpoint_f},
            records,
            vocabs,
            settings.sampling_plan(),
            content_lengths=(
                settings.content_length,
                settings.inference_content_length,
            ),
            targets=settings.eval_targets,
            seed=settings.seed,
            spec=settings.inference_spec(),
            threads=settings.predict_threads,
        )
    output = args.out or _paths(settings)["reports"] / "evaluation.txt"
    write_report(output, values)
    write_judged(output.with_suffix(".judged.jsonl"), samples)
    return f"Evaluated {len(samples)} judged samples, report at {output}"


def cmd_report(args: argparse.Namespace, settings: Settings) -> str:
    corpus = dedup_and_cap(_corpus(args, settings), settings.per_day_cap)
    values = {"selectivity": selectivity_report(corpus)}
    if args.out:
        write_report(args.out, values)
        return f"Wrote selectivity report to {args.out}"
    print(format_report(values), end="")
    return f"Reported selectivity over {len(corpus)} messages"


COMMANDS: dict[str, tuple[Callable[..., str], str]] = {
    "gen-corpus": (cmd_gen_corpus, "Generate a synthetic corpus."),
    "build-vocab": (cmd_build_vocab, "Build the four vocabularies."),
    "gen-labels": (cmd_gen_labels, "Write action and salutation labels."),
    "assemble": (cmd_assemble, "Summarize the four training sets."),
    "train": (cmd_train, "Train the sub-models and the full model."),
    "predict": (cmd_predict, "Score a corpus with a checkpoint."),
    "evaluate": (cmd_evaluate, "Adjusted evaluation with oversampling."),
    "report": (cmd_report, "Selectivity of the action conditions."),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hmctl", description="Human/machine mail classifier pipeline."
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument(
            "--config", type=Path, help="Env-style KEY=VALUE config file."
        )
        sub.add_argument(
            "--preset", choices=["desk", "production"], default="desk"
        )
        sub.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="Override one setting; repeatable.",
        )
        sub.add_argument("--seed", type=int, help="Seed for all randomness.")
        sub.add_argument("--artifacts", type=Path, help="Artifacts root.")
        sub.add_argument("--corpus", type=Path, help="Corpus JSONL file.")
        sub.add_argument("--vocab", type=Path, help="Vocabulary directory.")
        sub.add_argument("--checkpoint", type=Path, help="Model checkpoint.")
        sub.add_argument(
            "--sampling-checkpoint",
            type=Path,
            help="Checkpoint of the sampling model for evaluate.",
        )
        sub.add_argument(
            "--compare",
            action="store_true",
            help="evaluate: also score the content-only and full models "
            "at the training and inference content lengths.",
        )
        sub.add_argument("--out", type=Path, help="Output path.")
    return parser


def _settings(args: argparse.Namespace) -> Settings:
    overrides = parse_overrides(args.overrides)
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.artifacts is not None:
        overrides["artifacts_dir"] = args.artifacts
    return load_settings(args.config, preset=args.preset, overrides=overrides)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        settings = _settings(args)
    except (ValidationError, ValueError, FileNotFoundError) as exc:
        print(f"configuration error: {exc}")
        return EXIT_USAGE
    configure_logging(settings.log_level)
    handler, _ = COMMANDS[args.command]
    try:
        summary = handler(args, settings)
    except DivergenceError as exc:
        logger.error("%s", exc)
        return EXIT_DIVERGED
    except (
        CheckpointError,
        DataError,
        FileNotFoundError,
        VocabularyMismatchError,
    ) as exc:
        logger.error("%s", exc)
        return EXIT_DATA
    print(summary)
    return EXIT_OK
