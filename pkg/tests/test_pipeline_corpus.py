from __future__ import annotations

import json
from datetime import date
from pathlib import Path

import pytest

from pipeline.corpus import (
    read_corpus,
    read_labels,
    read_scores,
    write_corpus,
    write_labels,
    write_scores,
)
from pipeline.errors import DataError
from preprocessing.records import EmailRecord, GoldLabel


def _build_records(count: int) -> list[EmailRecord]:
    return [
        EmailRecord(
            message_id=f"msg-{i:04d}",
            sender_address=f"user{i}@mail.example",
            sender_name=f"User {i}",
            subject="hello",
            body=f"Hi Ana, message number {i}",
            recipient_names=("Ana",),
            opened=i % 2 == 0,
            deleted=i % 3 == 0,
            day=date(2024, 1, 1 + i % 5),
            gold_label=GoldLabel.HUMAN if i % 2 else GoldLabel.MACHINE,
        )
        for i in range(count)
    ]


def test_corpus_round_trip(tmp_path: Path) -> None:
    records = _build_records(5)
    path = tmp_path / "corpus.jsonl"
    assert write_corpus(path, records) == 5
    corpus = read_corpus(path)
    assert corpus.records == records
    assert corpus.malformed == 0
    header = json.loads(path.read_text().splitlines()[0])
    assert header["_format"] == "hm-corpus"


def test_malformed_lines_are_counted_and_skipped(tmp_path: Path) -> None:
    path = tmp_path / "corpus.jsonl"
    write_corpus(path, _build_records(200))
    with path.open("a", encoding="utf-8") as file:
        file.write('{"message_id": "broken"}\n')
        file.write(_build_records(1)[0].model_dump_json() + "\n")
    corpus = read_corpus(path)
    assert len(corpus) == 200
    assert corpus.malformed == 2


def test_too_many_malformed_lines_abort(tmp_path: Path) -> None:
    path = tmp_path / "corpus.jsonl"
    write_corpus(path, _build_records(10))
    with path.open("a", encoding="utf-8") as file:
        file.write("not json\n")
    with pytest.raises(DataError, match="malformed"):
        read_corpus(path)
    assert len(read_corpus(path, max_malformed_rate=0.5)) == 10


def test_missing_header_is_a_data_error(tmp_path: Path) -> None:
    path = tmp_path / "corpus.jsonl"
    path.write_text(_build_records(1)[0].model_dump_json() + "\n")
    with pytest.raises(DataError):
        read_corpus(path)
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    with pytest.raises(DataError):
        read_corpus(empty)


def test_labels_and_scores_files(tmp_path: Path) -> None:
    write_labels(tmp_path / "labels.tsv", [("a", 1), ("b", 0)])
    assert read_labels(tmp_path / "labels.tsv") == [("a", 1), ("b", 0)]
    (tmp_path / "bad.tsv").write_text("a\t2\n")
    with pytest.raises(DataError):
        read_labels(tmp_path / "bad.tsv")
    write_scores(tmp_path / "scores.tsv", [("a", 0.25), ("b", 1.0)])
    assert read_scores(tmp_path / "scores.tsv") == {"a": 0.25, "b": 1.0}
    assert "a\t0.25000000" in (tmp_path / "scores.tsv").read_text()
