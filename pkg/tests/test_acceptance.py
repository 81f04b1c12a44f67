"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line.  Tolerances and thresholds are pinned here, not derived at
run time.

Run with ``pytest tests/test_acceptance.py -v -s``.
"""

from __future__ import annotations

import time

import numpy as np
import psutil

from echolens import ingest as ing
from echolens.community import louvain, symmetrize
from echolens.config import RunConfig
from echolens.experiments import (
    degree_matched_controls,
    homophily_analysis,
    removal_experiment,
)
from echolens.ingest import PolarityTriple
from echolens.netgraph import build_graph, filter_active, neighborhood_polarity
from echolens.pipeline import run_pipeline
from echolens.polarity import (
    Category,
    categorize_user,
    profile_users,
    scores_of,
    tweet_score,
    user_score,
)
from echolens.stats import dunn_posthoc, kruskal_wallis
from echolens.synth import SynthParams, generate

from oracles import categorize_reference, dunn_reference, kruskal_reference


def _verdict(name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {name}: {status}{suffix}")


def test_scoring_exactness():
    rng = np.random.default_rng(0)
    raw = rng.dirichlet((1.0, 1.0, 1.0), size=10_000)
    t0 = time.time()
    ok = True
    for p_r, p_n, p_u in raw:
        p_n = 1.0 - p_r - p_u
        triple = PolarityTriple(p_russia=p_r, p_notsure=p_n, p_ukraine=p_u)
        if abs(tweet_score(triple) - (p_u - p_r)) > 1e-12:
            ok = False
            break
    for size in (1, 2, 7, 40, 333):
        values = rng.uniform(-1, 1, size=size)
        if abs(user_score(values.tolist()) - float(values.mean())) > 1e-12:
            ok = False
    elapsed = time.time() - t0
    ok = ok and elapsed < 1.0
    _verdict("scoring-exactness", ok, f"{elapsed:.3f}s for 10000 triples")
    assert ok


def test_categorization_oracle():
    cases = 0
    mismatches = 0
    for total in range(0, 51):
        for r in range(total + 1):
            for n in range(total - r + 1):
                u = total - r - n
                cases += 1
                if categorize_user(r, n, u) != categorize_reference(r, n, u):
                    mismatches += 1
    ok = cases == 23_426 and mismatches == 0
    _verdict("categorization-oracle", ok, f"{cases} cases, {mismatches} mismatches")
    assert ok


def test_louvain_recovery():
    successes = 0
    slowest = 0.0
    for seed in range(10):
        params = SynthParams(
            n_per_block=200, n_bridges=0, n_neutral=0,
            p_intra=0.05, p_inter=0.001, p_bridge=0.0, seed=100 + seed,
        )
        tweets, _, gt = generate(params)
        g = build_graph(tweets, {t.tweet_id: t.author_id for t in tweets})
        ug = symmetrize(g)
        t0 = time.time()
        part = louvain(ug, resolution=1.0, seed=seed)
        slowest = max(slowest, time.time() - t0)
        for earlier, later in zip(part.q_history, part.q_history[1:]):
            assert later >= earlier - 1e-12
        blocks = {u: "ru" for u in gt.block_russia}
        blocks.update({u: "uk" for u in gt.block_ukraine})
        by_size = sorted(part.communities, key=lambda c: -part.communities[c].size)
        pure = 0
        for cid in by_size[:2]:
            members = part.members_of(cid)
            counts = {"ru": 0, "uk": 0}
            for m in members:
                counts[blocks[m]] += 1
            if max(counts.values()) >= 0.95 * len(members):
                pure += 1
        if pure == 2:
            successes += 1
    ok = successes >= 9 and slowest < 5.0
    _verdict("louvain-recovery", ok, f"{successes}/10 seeds, slowest {slowest:.2f}s")
    assert ok


def test_homophily_detection():
    tweets, probs, _ = generate(SynthParams())  # default parameters
    pairs = [(t, probs[t.tweet_id]) for t in tweets]
    profiles = profile_users(pairs)
    scores = scores_of(profiles)
    g = filter_active(
        build_graph(tweets, {t.tweet_id: t.author_id for t in tweets}), 2
    )
    res = homophily_analysis(g, scores)
    r_real = res.correlation.statistic
    keys = sorted(scores)
    values = np.array([scores[k] for k in keys])
    null_hits = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        permuted = dict(zip(keys, rng.permutation(values).tolist()))
        r_null = homophily_analysis(g, permuted).correlation.statistic
        if abs(r_null) <= 0.05:
            null_hits += 1
    ok = r_real >= 0.6 and null_hits >= 95
    _verdict("homophily-detection", ok, f"r={r_real:.3f}, null |r|<=0.05 in {null_hits}/100")
    assert ok


def test_statistics_oracle():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(50):
        k = int(rng.integers(3, 6))
        groups = []
        for _ in range(k):
            size = int(rng.integers(5, 51))
            # Integer lattice values force plenty of ties.
            groups.append(rng.integers(0, 12, size=size).astype(float).tolist())
        mine = kruskal_wallis(groups)
        ref_h, ref_p = kruskal_reference(groups)
        worst = max(worst, abs(mine.statistic - ref_h), abs(mine.p_value - ref_p))
        labels = [str(i) for i in range(k)]
        dunn = dunn_posthoc(groups, labels=labels, adjustment="none")
        for (i, j), (ref_z, ref_pp) in dunn_reference(groups).items():
            res = dunn.pairs[(str(i), str(j))]
            worst = max(worst, abs(res.statistic - ref_z), abs(res.p_value - ref_pp))
    identical = kruskal_wallis([[3.0, 3.0], [3.0, 3.0, 3.0], [3.0]])
    exact = identical.statistic == 0.0 and identical.p_value == 1.0
    ok = worst <= 1e-6 and exact
    _verdict("statistics-oracle", ok, f"max |delta|={worst:.2e}, identical exact={exact}")
    assert ok


def test_removal_counterfactual():
    wins = 0
    slowest = 0.0
    for seed in range(10):
        t0 = time.time()
        params = SynthParams(
            n_per_block=300, n_bridges=60, n_neutral=0,
            p_intra=0.05, p_inter=0.0, p_bridge=0.05, seed=200 + seed,
        )
        tweets, probs, gt = generate(params)
        pairs = [(t, probs[t.tweet_id]) for t in tweets]
        profiles = profile_users(pairs)
        scores = scores_of(profiles)
        g = filter_active(
            build_graph(tweets, {t.tweet_id: t.author_id for t in tweets}), 2
        )
        part = louvain(symmetrize(g), resolution=0.1, seed=42)
        target = part.largest()
        members = set(part.members_of(target))
        bipartisan = sorted(
            u for u in members if profiles[u].category == Category.BIPARTISAN
        )
        pool = sorted(members - set(bipartisan))
        match = degree_matched_controls(g, bipartisan, pool, seed=seed)
        trace_b = removal_experiment(g, members, bipartisan, scores, seed=42)
        trace_c = removal_experiment(g, members, match.controls, scores, seed=42)
        if trace_b.rounds[-1].polarized_count > trace_c.rounds[-1].polarized_count:
            wins += 1
        slowest = max(slowest, time.time() - t0)
    ok = wins >= 8 and slowest < 30.0
    _verdict("removal-counterfactual", ok, f"{wins}/10 seeds, slowest pair {slowest:.1f}s")
    assert ok


def test_pipeline_determinism(tmp_path):
    params = SynthParams(n_per_block=250, n_bridges=30, n_neutral=20, seed=77)
    tweets, probs, _ = generate(params)
    tweets_path = str(tmp_path / "tweets.jsonl")
    probs_path = str(tmp_path / "probs.jsonl")
    ing.write_tweets(tweets, tweets_path)
    ing.write_probs(probs, probs_path)
    hashes = []
    for name in ("one", "two"):
        cfg = RunConfig(
            tweets=tweets_path, probs=probs_path, keyword_filter="default",
            out_dir=str(tmp_path / name),
        )
        manifest = run_pipeline(cfg)
        assert manifest["status"] == "complete"
        hashes.append({a["path"]: a["sha256"] for a in manifest["artifacts"]})
    ok = hashes[0] == hashes[1] and len(hashes[0]) >= 10
    _verdict("pipeline-determinism", ok, f"{len(hashes[0])} artifacts")
    assert ok


def test_scale_smoke():
    process = psutil.Process()
    rng = np.random.default_rng(3)
    n_nodes = 100_000
    draw = 1_060_000
    src = rng.integers(0, n_nodes, size=draw)
    dst = rng.integers(0, n_nodes, size=draw)
    keep = src != dst
    src, dst = src[keep], dst[keep]

    # One original per author plus one retweet record per sampled pair.
    records = [
        ing.TweetRecord(tweet_id=f"t{i}", author_id=f"n{i}", text="x")
        for i in range(n_nodes)
    ]
    tweet_author = {f"t{i}": f"n{i}" for i in range(n_nodes)}
    records.extend(
        ing.TweetRecord(
            tweet_id=f"r{k}",
            author_id=f"n{d}",
            text="x",
            referenced_tweet_id=f"t{s}",
        )
        for k, (s, d) in enumerate(zip(src.tolist(), dst.tolist()))
    )

    t0 = time.time()
    g = build_graph(records, tweet_author)
    assert g.edge_count >= 1_000_000
    fg = filter_active(g, 2)
    node_scores = rng.uniform(-1, 1, size=n_nodes)
    scores = {f"n{i}": float(node_scores[i]) for i in range(n_nodes)}
    neigh = neighborhood_polarity(fg, scores)
    elapsed = time.time() - t0
    rss_gb = process.memory_info().rss / (1 << 30)
    ok = elapsed < 60.0 and rss_gb < 4.0 and len(neigh) > 0
    _verdict("scale-smoke", ok, f"{elapsed:.1f}s, rss={rss_gb:.2f} GB, edges={g.edge_count}")
    assert ok
