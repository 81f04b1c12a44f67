"""Command-line entry point.

Subcommands: ingest, score, graph, community, run, synth, render, config.
Exit codes: 0 ok, 2 validation error, 3 I/O error, 4 internal invariant
breach.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import ingest as ing
from . import netgraph, synth
from .community import community_polarity, filter_communities, louvain, symmetrize, write_partition
from .config import RunConfig, config_to_ini, load_config, save_config
from .errors import InputError, InvariantError, ValidationError
from .pipeline import StageError, render_figures, run_from_artifacts, run_pipeline
from .polarity import profile_users, read_profiles, scores_of, tweet_label, tweet_score, write_profiles

logger = logging.getLogger(__name__)


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, StageError):
        return _exit_code(exc.cause)
    if isinstance(exc, InvariantError):
        return 4
    if isinstance(exc, (InputError, OSError)):
        return 3
    if isinstance(exc, ValidationError):
        return 2
    return 4


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="echolens", description=__doc__)
    top.add_argument("--seed", type=int, default=None, help="override run seeds")
    top.add_argument("--threads", type=int, default=None)
    top.add_argument("--log-level", default="warning")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse, filter and join tweets with probabilities")
    p.add_argument("--tweets", required=True)
    p.add_argument("--probs", required=True)
    p.add_argument("--filter", default="none", help="none | default | path to JSON filter")
    p.add_argument("--schema", default=None, help="JSON field-name mapping for the tweet file")
    p.add_argument("--out", required=True, help="output pairs JSONL path")

    p = sub.add_parser("score", help="score tweets and build user profiles")
    p.add_argument("--in", dest="pairs", required=True, help="pairs JSONL from ingest")
    p.add_argument("--out-profiles", required=True)
    p.add_argument("--out-tweet-scores", required=True)
    p.add_argument("--bipartisan-threshold", type=float, default=0.2)

    p = sub.add_parser("graph", help="build or filter the retweet network")
    gsub = p.add_subparsers(dest="graph_command", required=True)
    gb = gsub.add_parser("build")
    gb.add_argument("--pairs", required=True)
    gb.add_argument("--out", required=True, help="output directory")
    gf = gsub.add_parser("filter")
    gf.add_argument("--graph", required=True, help="input graph directory")
    gf.add_argument("--min-weight", type=int, default=2)
    gf.add_argument("--out", required=True)

    p = sub.add_parser("community", help="community detection")
    csub = p.add_subparsers(dest="community_command", required=True)
    cd = csub.add_parser("detect")
    cd.add_argument("--graph", required=True)
    cd.add_argument("--resolution", type=float, default=0.1)
    cd.add_argument("--seed", type=int, default=42, dest="louvain_seed")
    cd.add_argument("--min-size", type=int, default=10)
    cd.add_argument("--profiles", default=None, help="profiles CSV for polarity means")
    cd.add_argument("--out", required=True)

    p = sub.add_parser("run", help="run the analyses")
    p.add_argument("stage", choices=["all", "rq1", "rq2", "rq3", "rq4"])
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None, help="override configured output directory")
    p.add_argument("--graph", default=None, help="reuse a prebuilt graph directory")
    p.add_argument("--profiles", default=None, help="reuse a prebuilt profiles CSV")
    p.add_argument("--pairs", default=None, help="pairs JSONL (needed by rq3)")

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--params", default=None, help="JSON parameter file (defaults used if omitted)")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("render", help="render SVG figures from a results directory")
    p.add_argument("results", help="results directory")

    p = sub.add_parser("config", help="configuration helpers")
    p.add_argument("config_command", choices=["init"])
    p.add_argument("--out", default=None, help="write defaults to a file instead of stdout")

    return top


def _cmd_ingest(args) -> int:
    schema = None
    if args.schema:
        with open(args.schema, encoding="utf-8") as fh:
            schema = json.load(fh)
    records, report = ing.parse_tweets(args.tweets, schema=schema)
    if args.filter == "default":
        records = ing.filter_keywords(records)
    elif args.filter not in ("none", ""):
        records = ing.filter_keywords(records, ing.load_keyword_filter(args.filter))
    probs = ing.parse_probs(args.probs)
    pairs, unmatched = ing.join_polarity(records, probs)
    ing.write_pairs(pairs, args.out)
    print(
        f"parsed={report.parsed} malformed={report.malformed} "
        f"kept={len(records)} joined={len(pairs)} unmatched={unmatched}"
    )
    return 0


def _cmd_score(args) -> int:
    import csv as _csv

    pairs = ing.read_pairs(args.pairs)
    profiles = profile_users(pairs, threshold=args.bipartisan_threshold)
    write_profiles(profiles, args.out_profiles)
    with open(args.out_tweet_scores, "w", newline="", encoding="utf-8") as fh:
        w = _csv.writer(fh)
        w.writerow(["tweet_id", "author_id", "score", "label"])
        for rec, triple in pairs:
            w.writerow([rec.tweet_id, rec.author_id, repr(tweet_score(triple)), int(tweet_label(triple))])
    print(f"users={len(profiles)} tweets={len(pairs)}")
    return 0


def _cmd_graph(args) -> int:
    if args.graph_command == "build":
        pairs = ing.read_pairs(args.pairs)
        tweet_author = {rec.tweet_id: rec.author_id for rec, _ in pairs}
        g = netgraph.build_graph((rec for rec, _ in pairs), tweet_author)
        netgraph.save_graph(g, args.out)
        print(
            f"nodes={g.node_count} edges={g.edge_count} "
            f"skipped_refs={g.skipped_references} self_retweets={g.self_retweets}"
        )
    else:
        g = netgraph.load_graph(args.graph)
        filtered = netgraph.filter_active(g, args.min_weight)
        netgraph.save_graph(filtered, args.out)
        print(f"nodes={filtered.node_count} edges={filtered.edge_count}")
    return 0


def _cmd_community(args) -> int:
    g = netgraph.load_graph(args.graph)
    partition = louvain(symmetrize(g), resolution=args.resolution, seed=args.louvain_seed)
    if args.profiles:
        partition = community_polarity(partition, scores_of(read_profiles(args.profiles)))
    visible = filter_communities(partition, args.min_size)
    os.makedirs(args.out, exist_ok=True)
    write_partition(
        partition,
        os.path.join(args.out, "partition.csv"),
        os.path.join(args.out, "communities.csv"),
    )
    write_partition(
        visible,
        os.path.join(args.out, "partition_filtered.csv"),
        os.path.join(args.out, "communities_filtered.csv"),
    )
    print(
        f"communities={partition.n_communities} kept={visible.n_communities} "
        f"modularity={partition.modularity}"
    )
    return 0


def _cmd_run(args, seed: int | None, threads: int | None) -> int:
    cfg = load_config(args.config)
    if seed is not None:
        cfg.louvain_seed = seed
        cfg.control_seed = seed + 1
    if threads is not None:
        cfg.threads = threads
    if args.stage != "all":
        for stage in ("rq1", "rq2", "rq3", "rq4"):
            setattr(cfg, stage, stage == args.stage)
    if args.graph and args.profiles:
        stages = (
            ("rq1", "rq2", "rq3", "rq4") if args.stage == "all" else (args.stage,)
        )
        manifest = run_from_artifacts(
            cfg,
            out_dir=args.out or cfg.out_dir,
            graph_dir=args.graph,
            profiles_csv=args.profiles,
            pairs_path=args.pairs,
            stages=stages,
        )
    else:
        manifest = run_pipeline(cfg, out_dir=args.out)
    print(f"artifacts={len(manifest['artifacts'])} status={manifest['status']}")
    return 0


def _cmd_synth(args, seed: int | None) -> int:
    if args.params:
        with open(args.params, encoding="utf-8") as fh:
            params = synth.params_from_dict(json.load(fh))
    else:
        params = synth.SynthParams()
    if seed is not None:
        params.seed = seed
    tweets, probs, gt = synth.generate(params)
    os.makedirs(args.out, exist_ok=True)
    ing.write_tweets(tweets, os.path.join(args.out, "tweets.jsonl"))
    ing.write_probs(probs, os.path.join(args.out, "probs.jsonl"))
    with open(os.path.join(args.out, "ground_truth.json"), "w", encoding="utf-8") as fh:
        json.dump(
            {
                "group_of": gt.group_of,
                "bridges": sorted(gt.bridges),
                "summary": synth.describe(gt),
            },
            fh,
            sort_keys=True,
            indent=1,
        )
        fh.write("\n")
    print(f"tweets={len(tweets)} users={len(gt.group_of)} bridges={len(gt.bridges)}")
    return 0


def _cmd_config(args) -> int:
    cfg = RunConfig()
    if args.out:
        save_config(cfg, args.out)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(config_to_ini(cfg))
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level.upper())
    try:
        if args.command == "ingest":
            return _cmd_ingest(args)
        if args.command == "score":
            return _cmd_score(args)
        if args.command == "graph":
            return _cmd_graph(args)
        if args.command == "community":
            return _cmd_community(args)
        if args.command == "run":
            return _cmd_run(args, args.seed, args.threads)
        if args.command == "synth":
            return _cmd_synth(args, args.seed)
        if args.command == "render":
            figures = render_figures(args.results)
            print(f"figures={len(figures)}")
            return 0
        if args.command == "config":
            return _cmd_config(args)
        raise ValidationError(f"unknown command {args.command}")
    except Exception as exc:  # mapped to documented exit codes
        code = _exit_code(exc)
        print(f"error: {exc}", file=sys.stderr)
        logging.getLogger(__name__).debug("traceback", exc_info=exc)
        return code


if __name__ == "__main__":
    sys.exit(main())
