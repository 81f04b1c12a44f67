"""The four analyses: homophily, user census, influence, node removal.

Each orchestrates lower-level modules (graph, polarity, community, stats)
into one reported result object that serializes cleanly to JSON/CSV.
"""

from __future__ import annotations

import bisect
import logging
import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .community import (
    CommunityPartition,
    community_polarity,
    louvain,
    symmetrize,
)
from .errors import DomainError
from .ingest import PolarityTriple, TweetRecord
from .netgraph import RetweetGraph, neighborhood_polarity
from .polarity import Category, UserProfile, tweet_label
from .stats import (
    DensityGrid,
    TestResult,
    density2d,
    dunn_posthoc,
    ecdf_log1p10,
    kruskal_wallis,
    pearson,
)

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------
# Homophily with neighbours
# ---------------------------------------------------------------------


@dataclass
class HomophilyResult:
    grid: DensityGrid
    correlation: TestResult
    n_pairs: int
    own: list[float]
    neighborhood: list[float]


def homophily_analysis(
    g: RetweetGraph,
    scores: Mapping[str, float],
    bins: int = 50,
    min_in_neighbors: int = 1,
) -> HomophilyResult:
    """Pair each user's polarity with their retweet-neighborhood polarity.

    Produces the joint density grid over [-1,1]^2 and the Pearson
    correlation between the two series.
    """
    neigh = neighborhood_polarity(g, scores, min_in_neighbors=min_in_neighbors)
    own: list[float] = []
    nbr: list[float] = []
    for node in sorted(neigh):
        s = scores.get(node)
        if s is None:
            continue
        own.append(s)
        nbr.append(neigh[node])
    if len(own) < 3:
        raise DomainError("homophily analysis needs at least 3 scored nodes")
    grid = density2d(own, nbr, bins, bins, ((-1.0, 1.0), (-1.0, 1.0)))
    corr = pearson(own, nbr)
    return HomophilyResult(
        grid=grid, correlation=corr, n_pairs=len(own), own=own, neighborhood=nbr
    )


# ---------------------------------------------------------------------
# Census (user and community distribution)
# ---------------------------------------------------------------------


@dataclass
class CensusReport:
    users_per_category: dict[str, int]
    tweets_per_category: dict[str, int]
    verified_per_category: dict[str, int]
    verified_fraction: dict[str, float]
    community_table: list[dict]

    def to_dict(self) -> dict:
        return {
            "users_per_category": self.users_per_category,
            "tweets_per_category": self.tweets_per_category,
            "verified_per_category": self.verified_per_category,
            "verified_fraction": self.verified_fraction,
            "community_table": self.community_table,
        }


def community_census(
    partition: CommunityPartition | None,
    profiles: Mapping[str, UserProfile],
) -> CensusReport:
    """Count users, tweets and verified accounts per category, and lay out
    the community size-versus-polarity table."""
    users = {c: 0 for c in Category.ALL}
    tweets = {c: 0 for c in Category.ALL}
    verified = {c: 0 for c in Category.ALL}
    for p in profiles.values():
        users[p.category] += 1
        tweets[p.category] += p.n_tweets
        if p.verified:
            verified[p.category] += 1
    fraction = {
        c: (verified[c] / users[c] if users[c] else 0.0) for c in Category.ALL
    }
    table: list[dict] = []
    if partition is not None:
        for cid in sorted(partition.communities):
            info = partition.communities[cid]
            table.append(
                {
                    "community_id": cid,
                    "size": info.size,
                    "mean_polarity": info.mean_polarity,
                }
            )
    return CensusReport(
        users_per_category=users,
        tweets_per_category=tweets,
        verified_per_category=verified,
        verified_fraction=fraction,
        community_table=table,
    )


# ---------------------------------------------------------------------
# Influence
# ---------------------------------------------------------------------


@dataclass
class InfluenceRecord:
    user_id: str
    mean_retweets_per_tweet: float
    mean_likes_per_tweet: float
    normalized_retweets: float
    normalized_likes: float
    category: str


@dataclass
class InfluenceResult:
    records: list[InfluenceRecord]
    excluded_zero_followers: int
    excluded_unclassified: int
    tests: dict[str, dict] = field(default_factory=dict)
    ecdf: dict[str, dict[str, list[tuple[float, float]]]] = field(default_factory=dict)

    def groups(self, metric: str) -> dict[str, list[float]]:
        out: dict[str, list[float]] = {}
        for rec in self.records:
            if rec.category not in _INFLUENCE_GROUPS:
                continue
            out.setdefault(rec.category, []).append(getattr(rec, metric))
        return out


_INFLUENCE_GROUPS = (Category.PRO_RUSSIA, Category.PRO_UKRAINE, Category.BIPARTISAN)
_INFLUENCE_METRICS = ("normalized_retweets", "normalized_likes")


def influence_analysis(
    profiles: Mapping[str, UserProfile],
    records: Iterable[TweetRecord],
    adjustment: str = "bonferroni",
) -> InfluenceResult:
    """Follower-normalized engagement per user, compared across groups.

    Users without followers and Unclassified users are excluded.  Both the
    raw per-tweet means and the follower-normalized values are kept, since
    either normalization reading can be of interest.
    """
    rt_sum: dict[str, int] = {}
    like_sum: dict[str, int] = {}
    n_tweets: dict[str, int] = {}
    for rec in records:
        rt_sum[rec.author_id] = rt_sum.get(rec.author_id, 0) + rec.retweet_count
        like_sum[rec.author_id] = like_sum.get(rec.author_id, 0) + rec.like_count
        n_tweets[rec.author_id] = n_tweets.get(rec.author_id, 0) + 1

    out: list[InfluenceRecord] = []
    excluded_zero = 0
    excluded_uncl = 0
    for uid in sorted(profiles):
        p = profiles[uid]
        n = n_tweets.get(uid, 0)
        if n == 0:
            continue
        if p.category == Category.UNCLASSIFIED:
            excluded_uncl += 1
            continue
        if p.followers < 1:
            excluded_zero += 1
            continue
        mean_rt = rt_sum[uid] / n
        mean_like = like_sum[uid] / n
        out.append(
            InfluenceRecord(
                user_id=uid,
                mean_retweets_per_tweet=mean_rt,
                mean_likes_per_tweet=mean_like,
                normalized_retweets=mean_rt / p.followers,
                normalized_likes=mean_like / p.followers,
                category=p.category,
            )
        )

    result = InfluenceResult(
        records=out,
        excluded_zero_followers=excluded_zero,
        excluded_unclassified=excluded_uncl,
    )
    for metric in _INFLUENCE_METRICS:
        groups = result.groups(metric)
        present = [g for g in _INFLUENCE_GROUPS if len(groups.get(g, [])) >= 2]
        result.ecdf[metric] = {
            g: ecdf_log1p10(groups[g]) for g in groups if groups[g]
        }
        if len(present) < 2:
            logger.warning("influence: too few groups for %s, test skipped", metric)
            continue
        data = [groups[g] for g in present]
        kw = kruskal_wallis(data)
        dunn = dunn_posthoc(data, labels=present, adjustment=adjustment)
        means = {g: sum(groups[g]) / len(groups[g]) for g in present}
        result.tests[metric] = {
            "kruskal_wallis": kw.to_dict(),
            "dunn": dunn.to_dict(),
            "group_means": means,
        }
    return result


# ---------------------------------------------------------------------
# Bipartisan neighbor profile
# ---------------------------------------------------------------------


@dataclass
class GroupNeighborStats:
    group: str
    group_size: int
    predecessor_fraction: float
    successor_fraction: float
    overlap_fraction: float
    polarity_all: list[float]
    polarity_predecessors: list[float]
    polarity_successors: list[float]
    content_labels: dict[str, float]
    content_counts: dict[str, int]


@dataclass
class NeighborProfile:
    per_group: dict[str, GroupNeighborStats]
    tests: dict[str, dict] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "per_group": {
                g: {
                    "group_size": s.group_size,
                    "predecessor_fraction": s.predecessor_fraction,
                    "successor_fraction": s.successor_fraction,
                    "overlap_fraction": s.overlap_fraction,
                    "content_labels": s.content_labels,
                    "content_counts": s.content_counts,
                }
                for g, s in self.per_group.items()
            },
            "tests": self.tests,
        }


_LABEL_NAMES = {-1: "pro_russia", 0: "not_sure", 1: "pro_ukraine"}


def bipartisan_neighbor_profile(
    g: RetweetGraph,
    profiles: Mapping[str, UserProfile],
    pairs: Sequence[tuple[TweetRecord, PolarityTriple]],
    adjustment: str = "bonferroni",
) -> NeighborProfile:
    """How each partisan group touches bipartisan users in the network.

    For every partisan group: the share of its nodes that were retweeted
    by a bipartisan user (predecessor role), the share that retweeted a
    bipartisan user (successor role), polarity samples for those subsets,
    and the label breakdown of the bipartisan-authored tweets the
    successors relayed.
    """
    bipartisan = {
        uid for uid, p in profiles.items() if p.category == Category.BIPARTISAN
    }
    tweet_author: dict[str, str] = {}
    tweet_lab: dict[str, int] = {}
    for rec, triple in pairs:
        tweet_author[rec.tweet_id] = rec.author_id
        tweet_lab[rec.tweet_id] = int(tweet_label(triple))

    per_group: dict[str, GroupNeighborStats] = {}
    tests: dict[str, dict] = {}
    for group in (Category.PRO_RUSSIA, Category.PRO_UKRAINE):
        members = [
            uid for uid, p in profiles.items() if p.category == group and uid in g
        ]
        preds: set[str] = set()
        succs: set[str] = set()
        for uid in members:
            # uid is a predecessor of a bipartisan node when a bipartisan
            # user retweeted uid, i.e. an edge (uid -> b) exists.
            if any(b in bipartisan for b in g.successors(uid)):
                preds.add(uid)
            if any(b in bipartisan for b in g.predecessors(uid)):
                succs.add(uid)

        content_counts = {name: 0 for name in _LABEL_NAMES.values()}
        for rec, _ in pairs:
            if rec.referenced_tweet_id is None:
                continue
            author = profiles.get(rec.author_id)
            if author is None or author.category != group:
                continue
            src_author = tweet_author.get(rec.referenced_tweet_id)
            if src_author is None or src_author not in bipartisan:
                continue
            lab = tweet_lab.get(rec.referenced_tweet_id)
            if lab is None:
                continue
            content_counts[_LABEL_NAMES[lab]] += 1
        total_content = sum(content_counts.values())
        content_frac = {
            name: (count / total_content if total_content else 0.0)
            for name, count in content_counts.items()
        }

        size = len(members)
        stats = GroupNeighborStats(
            group=group,
            group_size=size,
            predecessor_fraction=len(preds) / size if size else 0.0,
            successor_fraction=len(succs) / size if size else 0.0,
            overlap_fraction=len(preds & succs) / size if size else 0.0,
            polarity_all=sorted(profiles[u].g_u for u in members),
            polarity_predecessors=sorted(profiles[u].g_u for u in preds),
            polarity_successors=sorted(profiles[u].g_u for u in succs),
            content_labels=content_frac,
            content_counts=content_counts,
        )
        per_group[group] = stats

        samples = {
            "entire_group": stats.polarity_all,
            "successor_nodes": stats.polarity_successors,
            "predecessor_nodes": stats.polarity_predecessors,
        }
        usable = {k: v for k, v in samples.items() if len(v) >= 2}
        if len(usable) >= 2:
            labels = sorted(usable)
            data = [usable[k] for k in labels]
            try:
                kw = kruskal_wallis(data)
                dunn = dunn_posthoc(data, labels=labels, adjustment=adjustment)
                tests[group] = {
                    "kruskal_wallis": kw.to_dict(),
                    "dunn": dunn.to_dict(),
                    "group_means": {
                        k: sum(v) / len(v) for k, v in usable.items()
                    },
                }
            except DomainError as exc:
                logger.warning("neighbor polarity test skipped for %s: %s", group, exc)
    return NeighborProfile(per_group=per_group, tests=tests)


# ---------------------------------------------------------------------
# Degree-matched controls and removal
# ---------------------------------------------------------------------


@dataclass
class ControlMatch:
    controls: list[str]
    degree_diffs: list[int]

    @property
    def max_diff(self) -> int:
        return max(self.degree_diffs) if self.degree_diffs else 0

    @property
    def exact_matches(self) -> int:
        return sum(1 for d in self.degree_diffs if d == 0)

    def to_dict(self) -> dict:
        return {
            "controls": self.controls,
            "degree_diffs": self.degree_diffs,
            "max_diff": self.max_diff,
            "exact_matches": self.exact_matches,
        }


def degree_matched_controls(
    g: RetweetGraph,
    bipartisan_set: Iterable[str],
    pool: Iterable[str],
    seed: int = 0,
    weighted: bool = False,
) -> ControlMatch:
    """Pick one control per bipartisan node with the closest total degree.

    Greedy, without replacement, visiting bipartisan nodes in descending
    degree order; ties among equally close pool nodes break uniformly at
    random under the seed.  Degree is the unweighted total edge count
    unless ``weighted`` is set.
    """
    targets = sorted(set(bipartisan_set))
    pool_list = sorted(set(pool) - set(targets))
    if len(pool_list) < len(targets):
        raise DomainError(
            f"control pool ({len(pool_list)}) smaller than target set ({len(targets)})"
        )

    def deg(node: str) -> int:
        win, wout, total = g.degrees(node)
        return win + wout if weighted else total

    rng = random.Random(seed)
    by_degree = sorted(((deg(n), n) for n in pool_list))
    degrees_sorted = [d for d, _ in by_degree]
    targets_ordered = sorted(targets, key=lambda n: (-deg(n), n))

    controls: list[str] = []
    diffs: list[int] = []
    for t in targets_ordered:
        want = deg(t)
        pos = bisect.bisect_left(degrees_sorted, want)
        candidates: list[int] = []
        best = None
        for probe in (pos - 1, pos):
            if 0 <= probe < len(degrees_sorted):
                d = abs(degrees_sorted[probe] - want)
                if best is None or d < best:
                    best = d
        if best is None:
            raise DomainError("control pool exhausted")
        lo = bisect.bisect_left(degrees_sorted, want - best)
        hi = bisect.bisect_right(degrees_sorted, want + best)
        candidates = [
            i for i in range(lo, hi) if abs(degrees_sorted[i] - want) == best
        ]
        choice = candidates[rng.randrange(len(candidates))]
        diffs.append(abs(degrees_sorted[choice] - want))
        controls.append(by_degree[choice][1])
        del degrees_sorted[choice]
        del by_degree[choice]
    return ControlMatch(controls=controls, degree_diffs=diffs)


@dataclass
class RemovalRound:
    round_index: int
    removed_so_far: int
    node_count: int
    community_count: int
    largest_share: float
    singleton_fraction: float
    polarity_values: list[float]
    polarized_count: int

    def to_dict(self) -> dict:
        return {
            "round_index": self.round_index,
            "removed_so_far": self.removed_so_far,
            "node_count": self.node_count,
            "community_count": self.community_count,
            "largest_share": self.largest_share,
            "singleton_fraction": self.singleton_fraction,
            "polarity_values": self.polarity_values,
            "polarized_count": self.polarized_count,
        }


@dataclass
class RemovalTrace:
    rounds: list[RemovalRound]
    removal_order: list[str]

    def to_list(self) -> list[dict]:
        return [r.to_dict() for r in self.rounds]


def _partition_stats(
    partition: CommunityPartition,
    node_count: int,
    polar_threshold: float,
) -> tuple[int, float, float, list[float], int]:
    n_comm = partition.n_communities
    if n_comm == 0:
        return 0, 0.0, 0.0, [], 0
    sizes = [info.size for info in partition.communities.values()]
    largest = max(sizes)
    singletons = sum(1 for s in sizes if s == 1)
    polarities = sorted(
        info.mean_polarity
        for info in partition.communities.values()
        if info.mean_polarity is not None
    )
    polarized = sum(1 for p in polarities if abs(p) > polar_threshold)
    return (
        n_comm,
        largest / node_count if node_count else 0.0,
        singletons / n_comm,
        polarities,
        polarized,
    )


def removal_experiment(
    g: RetweetGraph,
    community_nodes: Iterable[str],
    removal_set: Iterable[str],
    scores: Mapping[str, float],
    rounds: int = 10,
    resolution: float = 0.1,
    polar_threshold: float = 0.5,
    seed: int = 0,
) -> RemovalTrace:
    """Remove a node set in ascending-degree deciles, re-detecting
    communities after every round.

    Round 0 is the untouched baseline.  The community-detection seed is
    held fixed across rounds so fragmentation changes are attributable to
    the removals.  Each round removes ceil(|set|/rounds) nodes; the final
    round takes whatever remains.
    """
    if rounds < 1:
        raise DomainError("rounds must be >= 1")
    community_nodes = set(community_nodes)
    removal = set(removal_set)
    if not removal <= community_nodes:
        raise DomainError("removal set must lie inside the target community")
    for node in removal:
        if node not in g:
            raise DomainError(f"removal node not in graph: {node}")

    ordered = sorted(removal, key=lambda n: (g.degrees(n)[2], n))
    per_round = math.ceil(len(ordered) / rounds) if ordered else 0

    trace: list[RemovalRound] = []
    current = g
    removed = 0
    for round_index in range(rounds + 1):
        if round_index > 0:
            start = (round_index - 1) * per_round
            stop = len(ordered) if round_index == rounds else round_index * per_round
            batch = ordered[start:stop]
            if batch:
                current = current.without_nodes(batch)
                removed += len(batch)
        partition = louvain(symmetrize(current), resolution=resolution, seed=seed)
        community_polarity(partition, scores)
        n_comm, largest_share, singleton_frac, pols, polarized = _partition_stats(
            partition, current.node_count, polar_threshold
        )
        trace.append(
            RemovalRound(
                round_index=round_index,
                removed_so_far=removed,
                node_count=current.node_count,
                community_count=n_comm,
                largest_share=largest_share,
                singleton_fraction=singleton_frac,
                polarity_values=pols,
                polarized_count=polarized,
            )
        )
    return RemovalTrace(rounds=trace, removal_order=ordered)
