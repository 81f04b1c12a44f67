"""stanceclf command line: train a classifier, predict probability files."""

from __future__ import annotations

import argparse
import json
import sys

from .data import DataError, load_annotations, load_tweets_jsonl
from .predict import predict_probs, write_probs
from .train import load_grid, load_model, save_model, train


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="stanceclf", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="grid-search train on annotated tweets")
    p.add_argument("--data", required=True, help="CSV with tweet_id,text,label")
    p.add_argument("--grid", default=None, help="JSON grid file (defaults shipped)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-model", required=True)
    p.add_argument("--report", required=True, help="JSON model-card report path")

    p = sub.add_parser("predict", help="emit polarity probabilities for tweets")
    p.add_argument("--model", required=True)
    p.add_argument("--tweets", required=True, help="tweet JSONL with tweet_id,text")
    p.add_argument("--out", required=True)
    return top


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "train":
            annotated = load_annotations(args.data)
            result = train(annotated, grid=load_grid(args.grid), seed=args.seed)
            save_model(result, args.out_model)
            with open(args.report, "w", encoding="utf-8") as fh:
                json.dump(
                    {
                        "best": result.best_card.to_dict(),
                        "cards": [c.to_dict() for c in result.cards],
                        "seed": args.seed,
                    },
                    fh,
                    sort_keys=True,
                    indent=1,
                )
                fh.write("\n")
            print(
                f"best={result.best_card.embedding}+{result.best_card.algorithm} "
                f"macro_f1={result.best_card.mean_f1:.4f}"
            )
            return 0
        if args.command == "predict":
            model, _ = load_model(args.model)
            tweets = load_tweets_jsonl(args.tweets)
            rows = predict_probs(model, tweets)
            write_probs(rows, args.out)
            print(f"predicted={len(rows)}")
            return 0
        raise DataError(f"unknown command {args.command}")
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
