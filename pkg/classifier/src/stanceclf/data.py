"""Annotated-tweet loading and validation."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Iterable

from . import LABELS


class DataError(ValueError):
    pass


@dataclass(frozen=True)
class AnnotatedTweet:
    tweet_id: str
    text: str
    label: str

    def __post_init__(self):
        if self.label not in LABELS:
            raise DataError(f"label {self.label!r} not in {LABELS}")


def load_annotations(path: str) -> list[AnnotatedTweet]:
    """Read a CSV with header tweet_id,text,label."""
    out: list[AnnotatedTweet] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = {"tweet_id", "text", "label"} - set(reader.fieldnames or [])
        if missing:
            raise DataError(f"annotation file missing columns: {sorted(missing)}")
        for row in reader:
            out.append(
                AnnotatedTweet(
                    tweet_id=row["tweet_id"], text=row["text"], label=row["label"]
                )
            )
    return out


def load_tweets_jsonl(path: str) -> list[tuple[str, str]]:
    """Read (tweet_id, text) pairs from a tweet JSON-lines file."""
    out: list[tuple[str, str]] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            out.append((str(obj["tweet_id"]), str(obj.get("text", ""))))
    return out


def class_counts(annotated: Iterable[AnnotatedTweet]) -> dict[str, int]:
    counts: dict[str, int] = {}
    for item in annotated:
        counts[item.label] = counts.get(item.label, 0) + 1
    return counts
