"""Line-delimited corpus, label and score files."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from pydantic import ValidationError

from preprocessing.records import EmailRecord

from .errors import DataError

logger = logging.getLogger(__name__)

CORPUS_FORMAT = "hm-corpus"
FORMAT_VERSION = 1
DEFAULT_MALFORMED_RATE = 0.01


@dataclass(frozen=True)
class CorpusFile:
    path: Path
    records: list[EmailRecord]
    format_version: int = FORMAT_VERSION
    malformed: int = 0

    def __len__(self) -> int:
        return len(self.records)


def corpus_header() -> str:
    return json.dumps(
        {"_format": CORPUS_FORMAT, "format_version": FORMAT_VERSION},
        sort_keys=True,
    )


def write_corpus(path: Path, records: Iterable[EmailRecord]) -> int:
    """Write a header line then one JSON record per line; return the count."""

    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("w", encoding="utf-8", newline="\n") as file:
        file.write(corpus_header() + "\n")
        for record in records:
            file.write(record.model_dump_json() + "\n")
            count += 1
    return count


def _read_header(line: str, path: Path) -> int:
    try:
        header = json.loads(line)
    except json.JSONDecodeError:
        header = None
    if not isinstance(header, dict) or header.get("_format") != CORPUS_FORMAT:
        raise DataError(f"{path} does not start with a corpus header")
    version = header.get("format_version")
    if version != FORMAT_VERSION:
        raise DataError(f"{path} has unsupported format version {version}")
    return int(version)


def read_corpus(
    path: Path,
    *,
    max_malformed_rate: float = DEFAULT_MALFORMED_RATE,
) -> CorpusFile:
    """Parse a corpus file, skipping and counting malformed lines.

    Lines that fail validation or repeat an earlier message id count as
    malformed. More than ``max_malformed_rate`` of them aborts the read.
    """

    records: list[EmailRecord] = []
    seen: set[str] = set()
    malformed = 0
    lines = 0
    with path.open("r", encoding="utf-8") as file:
        first = file.readline()
        if not first:
            raise DataError(f"{path} is empty")
        version = _read_header(first, path)
        for number, line in enumerate(file, start=2):
            if not line.strip():
                continue
            lines += 1
            try:
                record = EmailRecord.model_validate_json(line)
            except ValidationError as exc:
                malformed += 1
                logger.debug("Malformed line %d in %s: %s", number, path, exc)
                continue
            if record.message_id in seen:
                malformed += 1
                logger.debug(
                    "Duplicate message id %s on line %d",
                    record.message_id,
                    number,
                )
                continue
            seen.add(record.message_id)
            records.append(record)

    logger.info(
        "Read %d records from %s (%d malformed)", len(records), path, malformed
    )
    if lines and malformed / lines > max_malformed_rate:
        raise DataError(
            f"{malformed} of {lines} lines in {path} are malformed, "
            f"above the {max_malformed_rate:.2%} limit"
        )
    return CorpusFile(path, records, version, malformed)


def write_labels(path: Path, labels: Sequence[tuple[str, int]]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as file:
        for message_id, label in labels:
            file.write(f"{message_id}\t{label}\n")


def read_labels(path: Path) -> list[tuple[str, int]]:
    labels = []
    with path.open("r", encoding="utf-8") as file:
        for number, line in enumerate(file, start=1):
            if not line.strip():
                continue
            message_id, _, label = line.rstrip("\n").partition("\t")
            if label not in {"0", "1"}:
                raise DataError(f"{path}:{number}: label must be 0 or 1")
            labels.append((message_id, int(label)))
    return labels


def write_scores(path: Path, scores: Sequence[tuple[str, float]]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as file:
        for message_id, score in scores:
            file.write(f"{message_id}\t{score:.8f}\n")


def read_scores(path: Path) -> dict[str, float]:
    scores = {}
    with path.open("r", encoding="utf-8") as file:
        for line in file:
            if line.strip():
                message_id, _, score = line.rstrip("\n").partition("\t")
                scores[message_id] = float(score)
    return scores
