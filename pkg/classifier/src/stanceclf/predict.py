"""Probability emission in the polarity-file schema.

Output lines are ``{"tweet_id", "p_russia", "p_notsure", "p_ukraine"}``
with the three components renormalized to sum to exactly the written
precision's 1.0, matching what the analysis toolkit's ingest validation
expects.
"""

from __future__ import annotations

import json
from typing import Iterable

from . import LABELS
from .data import DataError
from .preprocess import preprocess_text

_FIELD_OF = {"pro-Russia": "p_russia", "not-sure": "p_notsure", "pro-Ukraine": "p_ukraine"}


def predict_probs(model, tweets: Iterable[tuple[str, str]]) -> list[dict]:
    """Return one probability object per (tweet_id, text) pair."""
    items = list(tweets)
    if not items:
        return []
    if not hasattr(model, "predict_proba"):
        raise DataError("model does not expose probabilities; train() calibrates all shipped ones")
    texts = [preprocess_text(text) for _, text in items]
    raw = model.predict_proba(texts)
    classes = list(model.classes_)
    rows = []
    for (tweet_id, _), probs in zip(items, raw):
        by_label = {label: 0.0 for label in LABELS}
        for cls, p in zip(classes, probs):
            by_label[str(cls)] = float(p)
        total = sum(by_label.values())
        if total <= 0:
            raise DataError(f"degenerate probability row for tweet {tweet_id}")
        row = {"tweet_id": tweet_id}
        for label in LABELS:
            row[_FIELD_OF[label]] = by_label[label] / total
        rows.append(row)
    return rows


def write_probs(rows: Iterable[dict], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
