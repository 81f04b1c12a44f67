"""Classifier release criterion: 600-example separable corpus, full grid.

Run with ``pytest tests/test_acceptance.py -v -s``.
"""

from __future__ import annotations

import json
import subprocess
import sys

from stanceclf.predict import predict_probs, write_probs
from stanceclf.train import train


def test_classifier_contract(tmp_path, corpus600):
    result_a = train(corpus600, seed=11)
    result_b = train(corpus600, seed=11)

    f1_ok = result_a.best_card.mean_f1 >= 0.9
    folds_a = {(c.embedding, c.algorithm): c.fold_f1 for c in result_a.cards}
    folds_b = {(c.embedding, c.algorithm): c.fold_f1 for c in result_b.cards}
    repro_ok = folds_a == folds_b

    tweets = [
        {"tweet_id": t.tweet_id, "author_id": f"user{i % 40}", "text": t.text}
        for i, t in enumerate(corpus600)
    ]
    tweets_path = tmp_path / "tweets.jsonl"
    tweets_path.write_text("".join(json.dumps(t) + "\n" for t in tweets))
    rows = predict_probs(result_a.best_model, [(t["tweet_id"], t["text"]) for t in tweets])
    probs_path = tmp_path / "probs.jsonl"
    write_probs(rows, str(probs_path))
    proc = subprocess.run(
        [
            sys.executable, "-m", "echolens.cli", "ingest",
            "--tweets", str(tweets_path), "--probs", str(probs_path),
            "--filter", "none", "--out", str(tmp_path / "pairs.jsonl"),
        ],
        capture_output=True,
        text=True,
    )
    ingest_ok = proc.returncode == 0 and f"joined={len(tweets)} unmatched=0" in proc.stdout

    ok = f1_ok and repro_ok and ingest_ok
    status = "PASS" if ok else "FAIL"
    print(
        f"ACCEPTANCE classifier-contract: {status} "
        f"(best={result_a.best_card.embedding}+{result_a.best_card.algorithm} "
        f"macro_f1={result_a.best_card.mean_f1:.3f}, repro={repro_ok}, ingest={ingest_ok})"
    )
    assert ok
