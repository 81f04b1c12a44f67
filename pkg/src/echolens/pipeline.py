"""End-to-end pipeline: ingest -> score -> graph -> analyses -> manifest.

Every produced file is listed in ``manifest.json`` with its SHA-256, so a
rerun with identical inputs and seeds can be checked for bit-identical
results.  Writes are atomic (temp file + rename) and no artifact embeds
wall-clock time.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import ingest as ing
from . import netgraph, svgplot
from .community import community_polarity, filter_communities, louvain, symmetrize
from .config import RunConfig
from .errors import EchoLensError, InputError
from .experiments import (
    bipartisan_neighbor_profile,
    community_census,
    degree_matched_controls,
    homophily_analysis,
    influence_analysis,
    removal_experiment,
)
from .polarity import (
    Category,
    profile_users,
    read_profiles,
    scores_of,
    tweet_label,
    tweet_score,
    write_profiles,
)

logger = logging.getLogger(__name__)


class StageError(EchoLensError):
    """Failure inside a named pipeline stage."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class Workspace:
    """Artifact directory with hashing and atomic writes."""

    root: str
    produced: list[str] = field(default_factory=list)

    def path(self, rel: str) -> str:
        full = os.path.join(self.root, rel)
        os.makedirs(os.path.dirname(full) or ".", exist_ok=True)
        return full

    def write_text(self, rel: str, text: str) -> str:
        full = self.path(rel)
        tmp = full + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, full)
        self.produced.append(rel)
        return full

    def write_json(self, rel: str, obj) -> str:
        return self.write_text(rel, json.dumps(obj, sort_keys=True, indent=1) + "\n")

    def write_with(self, rel: str, writer) -> str:
        """Atomic write through a ``writer(path)`` callback."""
        full = self.path(rel)
        tmp = full + ".tmp"
        writer(tmp)
        os.replace(tmp, full)
        self.produced.append(rel)
        return full

    def register(self, rel: str) -> None:
        self.produced.append(rel)

    def manifest(self, status: str, cfg: RunConfig, error: str | None = None) -> dict:
        artifacts = []
        for rel in sorted(set(self.produced)):
            full = os.path.join(self.root, rel)
            if not os.path.exists(full):
                continue
            digest = hashlib.sha256()
            with open(full, "rb") as fh:
                for chunk in iter(lambda: fh.read(1 << 16), b""):
                    digest.update(chunk)
            artifacts.append(
                {
                    "path": rel,
                    "sha256": digest.hexdigest(),
                    "bytes": os.path.getsize(full),
                }
            )
        manifest = {
            "status": status,
            "config": {k: getattr(cfg, k) for k in vars(cfg)},
            "artifacts": artifacts,
        }
        if error:
            manifest["error"] = error
        full = os.path.join(self.root, "manifest.json")
        tmp = full + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(manifest, sort_keys=True, indent=1) + "\n")
        os.replace(tmp, full)
        return manifest


def _stage(name: str):
    def deco(fn):
        def wrapped(*args, **kwargs):
            try:
                return fn(*args, **kwargs)
            except StageError:
                raise
            except Exception as exc:
                raise StageError(name, exc) from exc

        return wrapped

    return deco


@_stage("ingest.parse_tweets")
def _load_tweets(cfg: RunConfig):
    if not cfg.tweets:
        raise InputError("no tweet file configured")
    records, report = ing.parse_tweets(cfg.tweets)
    if cfg.keyword_filter == "default":
        records = ing.filter_keywords(records, ing.DEFAULT_FILTER)
    elif cfg.keyword_filter not in ("none", ""):
        records = ing.filter_keywords(records, ing.load_keyword_filter(cfg.keyword_filter))
    return records, report


@_stage("ingest.join_polarity")
def _join(cfg: RunConfig, records):
    probs = ing.parse_probs(cfg.probs)
    return ing.join_polarity(records, probs)


@_stage("netgraph.build_graph")
def _build_graph(cfg: RunConfig, pairs, tweet_author):
    g = netgraph.build_graph((rec for rec, _ in pairs), tweet_author)
    return netgraph.filter_active(g, cfg.min_edge_weight)


def run_pipeline(cfg: RunConfig, out_dir: str | None = None) -> dict:
    """Execute the configured stages; returns the manifest dict.

    Raises StageError on failure after writing an ``incomplete`` manifest
    that lists whatever artifacts had already been produced.
    """
    cfg.validate()
    ws = Workspace(out_dir or cfg.out_dir)
    os.makedirs(ws.root, exist_ok=True)
    try:
        return _run_pipeline_inner(cfg, ws)
    except StageError as exc:
        ws.manifest("incomplete", cfg, error=str(exc))
        raise


def _run_pipeline_inner(cfg: RunConfig, ws: Workspace) -> dict:
    records, report = _load_tweets(cfg)
    tweet_author = {r.tweet_id: r.author_id for r in records}
    pairs, unmatched = _join(cfg, records)
    ws.write_json(
        "ingest_report.json",
        {
            "parsed": report.parsed,
            "malformed": report.malformed,
            "kept_after_filter": len(records),
            "joined": len(pairs),
            "unmatched": unmatched,
        },
    )
    ws.write_with("pairs.jsonl", lambda p: ing.write_pairs(pairs, p))

    # Scoring
    profiles = profile_users(pairs, threshold=cfg.bipartisan_threshold)
    ws.write_with("profiles.csv", lambda p: write_profiles(profiles, p))

    def _write_scores(path: str) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["tweet_id", "author_id", "score", "label"])
            for rec, triple in pairs:
                w.writerow(
                    [rec.tweet_id, rec.author_id, repr(tweet_score(triple)), int(tweet_label(triple))]
                )

    ws.write_with("tweet_scores.csv", _write_scores)
    scores = scores_of(profiles)

    # Graph
    g = _build_graph(cfg, pairs, tweet_author)
    netgraph.save_graph(g, ws.path("graph"))
    ws.register(os.path.join("graph", "edges.csv"))
    ws.register(os.path.join("graph", "nodes.csv"))

    # Baseline communities (used by RQ2 census and RQ4)
    partition = louvain(symmetrize(g), resolution=cfg.louvain_resolution, seed=cfg.louvain_seed)
    community_polarity(partition, scores)
    from .community import write_partition

    write_partition(partition, ws.path("partition.csv.tmp"), ws.path("communities.csv.tmp"))
    for name in ("partition.csv", "communities.csv"):
        os.replace(ws.path(name + ".tmp"), ws.path(name))
        ws.register(name)

    if cfg.rq1:
        _run_rq1(cfg, ws, g, scores)
    if cfg.rq2:
        _run_rq2(cfg, ws, partition, profiles)
    if cfg.rq3:
        _run_rq3(cfg, ws, g, profiles, pairs)
    if cfg.rq4:
        _run_rq4(cfg, ws, g, partition, profiles, scores)

    if cfg.figures:
        render_figures(ws.root, workspace=ws)

    return ws.manifest("complete", cfg)


def run_from_artifacts(
    cfg: RunConfig,
    out_dir: str,
    graph_dir: str,
    profiles_csv: str,
    pairs_path: str | None = None,
    stages: tuple[str, ...] = ("rq1", "rq2", "rq3", "rq4"),
) -> dict:
    """Run analysis stages against previously built artifacts.

    The graph directory and profiles CSV are mandatory; the pairs file is
    only needed for the influence/neighbor analyses.
    """
    cfg.validate()
    ws = Workspace(out_dir)
    os.makedirs(ws.root, exist_ok=True)
    try:
        g = netgraph.load_graph(graph_dir)
        profiles = read_profiles(profiles_csv)
        scores = scores_of(profiles)
        pairs = ing.read_pairs(pairs_path) if pairs_path else None
        partition = None
        if "rq2" in stages or "rq4" in stages:
            partition = louvain(
                symmetrize(g), resolution=cfg.louvain_resolution, seed=cfg.louvain_seed
            )
            community_polarity(partition, scores)
        if "rq1" in stages:
            _run_rq1(cfg, ws, g, scores)
        if "rq2" in stages:
            _run_rq2(cfg, ws, partition, profiles)
        if "rq3" in stages:
            if pairs is None:
                raise StageError(
                    "experiments.influence_analysis",
                    InputError("rq3 requires a pairs file (--pairs)"),
                )
            _run_rq3(cfg, ws, g, profiles, pairs)
        if "rq4" in stages:
            _run_rq4(cfg, ws, g, partition, profiles, scores)
        if cfg.figures:
            render_figures(ws.root, workspace=ws)
        return ws.manifest("complete", cfg)
    except StageError as exc:
        ws.manifest("incomplete", cfg, error=str(exc))
        raise


@_stage("experiments.homophily_analysis")
def _run_rq1(cfg: RunConfig, ws: Workspace, g, scores) -> None:
    res = homophily_analysis(
        g, scores, bins=cfg.density_bins, min_in_neighbors=cfg.min_in_neighbors
    )
    ws.write_json(
        "homophily.json",
        {
            "pearson": res.correlation.to_dict(),
            "n_pairs": res.n_pairs,
            "grid": res.grid.to_dict(),
        },
    )


@_stage("experiments.community_census")
def _run_rq2(cfg: RunConfig, ws: Workspace, partition, profiles) -> None:
    visible = filter_communities(partition, cfg.community_min_size)
    census = community_census(visible, profiles)
    ws.write_json("census.json", census.to_dict())


@_stage("experiments.influence_analysis")
def _run_rq3(cfg: RunConfig, ws: Workspace, g, profiles, pairs) -> None:
    res = influence_analysis(profiles, (rec for rec, _ in pairs))

    def _write_records(path: str) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(
                [
                    "user_id",
                    "mean_retweets_per_tweet",
                    "mean_likes_per_tweet",
                    "normalized_retweets",
                    "normalized_likes",
                    "category",
                ]
            )
            for r in res.records:
                w.writerow(
                    [
                        r.user_id,
                        repr(r.mean_retweets_per_tweet),
                        repr(r.mean_likes_per_tweet),
                        repr(r.normalized_retweets),
                        repr(r.normalized_likes),
                        r.category,
                    ]
                )

    ws.write_with("influence_records.csv", _write_records)
    ws.write_json(
        "influence_tests.json",
        {
            "tests": res.tests,
            "excluded_zero_followers": res.excluded_zero_followers,
            "excluded_unclassified": res.excluded_unclassified,
        },
    )

    def _write_ecdf(path: str) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["metric", "group", "x", "cumulative_fraction"])
            for metric in sorted(res.ecdf):
                for group in sorted(res.ecdf[metric]):
                    for x, f in res.ecdf[metric][group]:
                        w.writerow([metric, group, repr(x), repr(f)])

    ws.write_with("influence_ecdf.csv", _write_ecdf)

    profile = bipartisan_neighbor_profile(g, profiles, pairs)
    ws.write_json("neighbor_profile.json", profile.to_dict())

    def _write_polarity(path: str) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["group", "role", "g_u"])
            for group in sorted(profile.per_group):
                stats = profile.per_group[group]
                for role, values in (
                    ("entire_group", stats.polarity_all),
                    ("predecessor_nodes", stats.polarity_predecessors),
                    ("successor_nodes", stats.polarity_successors),
                ):
                    for v in values:
                        w.writerow([group, role, repr(v)])

    ws.write_with("neighbor_polarity.csv", _write_polarity)


@_stage("experiments.removal_experiment")
def _run_rq4(cfg: RunConfig, ws: Workspace, g, partition, profiles, scores) -> None:
    target = partition.largest()
    if target is None:
        ws.write_json("removal_traces.json", {"skipped": "no communities detected"})
        return
    members = set(partition.members_of(target))
    bipartisan = sorted(
        uid
        for uid in members
        if uid in profiles and profiles[uid].category == Category.BIPARTISAN
    )
    pool = sorted(members - set(bipartisan))
    if not bipartisan or len(pool) < len(bipartisan):
        ws.write_json(
            "removal_traces.json",
            {"skipped": "not enough bipartisan or control nodes in the largest community"},
        )
        return
    match = degree_matched_controls(g, bipartisan, pool, seed=cfg.control_seed)

    def run_arm(removal_set):
        return removal_experiment(
            g,
            members,
            removal_set,
            scores,
            rounds=cfg.removal_rounds,
            resolution=cfg.louvain_resolution,
            polar_threshold=cfg.polarized_threshold,
            seed=cfg.louvain_seed,
        )

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=2) as pool_exec:
            fut_b = pool_exec.submit(run_arm, bipartisan)
            fut_c = pool_exec.submit(run_arm, match.controls)
            trace_b, trace_c = fut_b.result(), fut_c.result()
    else:
        trace_b = run_arm(bipartisan)
        trace_c = run_arm(match.controls)
    ws.write_json(
        "removal_traces.json",
        {
            "community_id": target,
            "community_size": len(members),
            "bipartisan": trace_b.to_list(),
            "control": trace_c.to_list(),
            "control_match": match.to_dict(),
        },
    )


# ---------------------------------------------------------------------
# Figures
# ---------------------------------------------------------------------


def render_figures(results_dir: str, workspace: Workspace | None = None) -> list[str]:
    """Render SVG figures for whatever result files are present.

    Missing inputs skip their figure with a warning.  Returns the figure
    paths written.
    """
    written: list[str] = []

    def emit(rel: str, svg: str) -> None:
        full = os.path.join(results_dir, rel)
        tmp = full + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(svg)
        os.replace(tmp, full)
        written.append(rel)
        if workspace is not None:
            workspace.register(rel)

    def load_json(name: str):
        path = os.path.join(results_dir, name)
        if not os.path.exists(path):
            logger.warning("render: %s missing, figure skipped", name)
            return None
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)

    homophily = load_json("homophily.json")
    if homophily:
        grid = homophily["grid"]
        emit(
            "fig_homophily_density.svg",
            svgplot.heatmap_with_marginals(
                grid["x_edges"],
                grid["y_edges"],
                grid["counts"],
                title="User polarity vs neighborhood polarity",
                x_label="user polarity",
                y_label="neighborhood polarity",
            ),
        )

    census = load_json("census.json")
    if census and census.get("community_table"):
        points = [
            (row["mean_polarity"], row["size"])
            for row in census["community_table"]
            if row.get("mean_polarity") is not None
        ]
        if points:
            emit(
                "fig_community_size_polarity.svg",
                svgplot.scatter_chart(
                    sorted(points),
                    title="Community size vs mean polarity",
                    x_label="community mean polarity",
                    y_label="community size",
                    log_y=True,
                ),
            )
    elif census is not None:
        logger.warning("render: community table empty, size/polarity figure skipped")

    profiles_path = os.path.join(results_dir, "profiles.csv")
    if os.path.exists(profiles_path):
        per_group: dict[str, dict[str, list[float]]] = {}
        for p in read_profiles(profiles_path).values():
            bucket = per_group.setdefault(p.category, {"pro_russia": [], "not_sure": [], "pro_ukraine": []})
            bucket["pro_russia"].append(p.count_russia)
            bucket["not_sure"].append(p.count_notsure)
            bucket["pro_ukraine"].append(p.count_ukraine)
        for group in (Category.BIPARTISAN, Category.PRO_RUSSIA, Category.PRO_UKRAINE):
            if group not in per_group:
                continue
            series = {
                label: _ecdf_points(vals)
                for label, vals in per_group[group].items()
                if vals
            }
            emit(
                f"fig_tweet_count_cdfs_{group.lower()}.svg",
                svgplot.cdf_chart(
                    series,
                    title=f"Tweet-count CDFs: {group}",
                    x_label="log10(tweet count + 1)",
                ),
            )

    ecdf_path = os.path.join(results_dir, "influence_ecdf.csv")
    if os.path.exists(ecdf_path):
        by_metric: dict[str, dict[str, list[tuple[float, float]]]] = {}
        with open(ecdf_path, newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                by_metric.setdefault(row["metric"], {}).setdefault(row["group"], []).append(
                    (float(row["x"]), float(row["cumulative_fraction"]))
                )
        for metric, series in by_metric.items():
            emit(
                f"fig_influence_{metric.replace('normalized_', '')}.svg",
                svgplot.cdf_chart(
                    series,
                    title=f"Follower-normalized {metric.replace('normalized_', '')} per tweet",
                    x_label="log10(value + 1)",
                ),
            )

    neighbor_path = os.path.join(results_dir, "neighbor_polarity.csv")
    if os.path.exists(neighbor_path):
        by_group: dict[str, dict[str, list[float]]] = {}
        with open(neighbor_path, newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                by_group.setdefault(row["group"], {}).setdefault(row["role"], []).append(
                    float(row["g_u"])
                )
        for group, roles in by_group.items():
            series = {
                role: [(x, f) for x, f in _plain_ecdf(vals)] for role, vals in roles.items()
            }
            emit(
                f"fig_neighbor_polarity_{group.lower()}.svg",
                svgplot.cdf_chart(
                    series,
                    title=f"Polarity around bipartisan users: {group}",
                    x_label="user polarity",
                ),
            )

    removal = load_json("removal_traces.json")
    if removal and "bipartisan" in removal:
        series = {
            arm: [(r["round_index"], r["community_count"]) for r in removal[arm]]
            for arm in ("bipartisan", "control")
        }
        emit(
            "fig_removal_communities.svg",
            svgplot.line_chart(
                series,
                title="Communities after each removal round",
                x_label="removal round",
                y_label="community count",
                log_y=True,
            ),
        )
        for arm in ("bipartisan", "control"):
            boxes = {
                str(r["round_index"]): r["polarity_values"] for r in removal[arm]
            }
            emit(
                f"fig_removal_polarity_{arm}.svg",
                svgplot.box_chart(
                    boxes,
                    title=f"Community polarity per round ({arm} removal)",
                    y_label="community mean polarity",
                ),
            )
    return written


def _ecdf_points(values) -> list[tuple[float, float]]:
    from .stats import ecdf_log1p10

    return ecdf_log1p10(values)


def _plain_ecdf(values) -> list[tuple[float, float]]:
    vs = sorted(values)
    n = len(vs)
    out = []
    seen = 0
    i = 0
    while i < n:
        j = i
        while j + 1 < n and vs[j + 1] == vs[i]:
            j += 1
        seen = j + 1
        out.append((vs[i], seen / n))
        i = j + 1
    return out
