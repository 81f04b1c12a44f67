"""Synthetic tweet datasets with planted echo chambers and bridge users.

Two polarized blocks retweet mostly within themselves, a set of bridge
users connects both blocks, and optional neutral users hang off the
blocks.  The generator emits the same file formats the ingest module
consumes, so the whole pipeline can be exercised end to end against known
ground truth.

Guarantees engineered into the output (all exact, not statistical):

* every bridge user ends up Bipartisan under the default 20% rule, and no
  other user does.  Block users never retweet content labelled for the
  opposite side (they pick own-side or not-sure tweets from a source, and
  a cross-block retweet is dropped when the source offers nothing
  neutral); bridge and neutral users only retweet not-sure content; bridge
  users author enough side-labelled tweets to keep both side shares at or
  above 21% of their total output, retweets included.
* intra-block edges are plain Bernoulli draws over ordered pairs, so the
  realized density is binomial around p_intra.
* byte-identical output for identical (params, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from typing import NamedTuple

import numpy as np

from .errors import DomainError
from .ingest import PolarityTriple, TweetRecord

GROUP_RUSSIA = "pro_russia_block"
GROUP_UKRAINE = "pro_ukraine_block"
GROUP_BRIDGE = "bridge"
GROUP_NEUTRAL = "neutral"

_LABEL_R, _LABEL_N, _LABEL_U = -1, 0, 1


@dataclass
class SynthParams:
    n_per_block: int = 1200
    n_bridges: int = 60
    n_neutral: int = 60
    p_intra: float = 0.02
    p_inter: float = 0.002
    p_bridge: float = 0.05
    weight_law: float = 0.6          # geometric p for retweet multiplicity
    polarity_center: float = 0.8
    polarity_noise: float = 0.1
    tweets_per_user_law: float = 0.5  # geometric p for originals per user
    block_notsure_rate: float = 0.1
    content_preference: float = 0.75  # partisan pick of own-side bridge content
    retweet_mean: float = 2.0
    like_mean: float = 1.0
    engagement_shape: float = 1.0
    engagement_shift: dict[str, float] = field(
        default_factory=lambda: {
            GROUP_RUSSIA: 3.0,
            GROUP_UKRAINE: 1.0,
            GROUP_BRIDGE: 2.0,
            GROUP_NEUTRAL: 1.0,
        }
    )
    zero_follower_rate: float = 0.02
    seed: int = 0

    def validate(self) -> None:
        if self.n_per_block < 1:
            raise DomainError("n_per_block must be >= 1")
        if self.n_bridges < 0 or self.n_neutral < 0:
            raise DomainError("n_bridges and n_neutral must be >= 0")
        for name in ("p_intra", "p_inter", "p_bridge", "content_preference",
                     "zero_follower_rate", "block_notsure_rate"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name} must be in [0,1], got {v}")
        if self.p_intra <= self.p_inter:
            raise DomainError("echo-chamber regime requires p_intra > p_inter")
        for name in ("weight_law", "tweets_per_user_law"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise DomainError(f"{name} must be in (0,1], got {v}")
        if not 0.0 < self.polarity_center < 1.0:
            raise DomainError("polarity_center must be in (0,1)")
        if self.polarity_noise < 0:
            raise DomainError("polarity_noise must be >= 0")
        if min(self.retweet_mean, self.like_mean) < 0 or self.engagement_shape <= 0:
            raise DomainError("engagement parameters out of range")
        for g, s in self.engagement_shift.items():
            if s <= 0:
                raise DomainError(f"engagement_shift[{g}] must be positive")


@dataclass
class GroundTruth:
    group_of: dict[str, str]
    bridges: set[str]
    block_russia: list[str]
    block_ukraine: list[str]
    neutral: list[str]
    seed: int


class SynthResult(NamedTuple):
    tweets: list[TweetRecord]
    probs: dict[str, PolarityTriple]
    ground_truth: GroundTruth


@dataclass
class _Author:
    user_id: str
    group: str
    followers: int
    verified: bool
    tweet_ids: list[str] = field(default_factory=list)
    tweets_by_label: dict[int, list[int]] = field(default_factory=dict)


def _triple_for(label: int, score: float, u: float) -> PolarityTriple:
    """Probability triple with p_ukraine - p_russia == score and argmax == label.

    ``u`` in [0,1) picks a point inside the feasible region, keeping the
    construction deterministic for a given random draw.
    """
    if label == _LABEL_U:
        s = min(max(score, 1e-6), 1.0 - 1e-6)
        t_lo = max(0.0, (1.0 - 2.0 * s) / 3.0) + 1e-9
        t_hi = (1.0 - s) / 2.0 - 1e-9
        t = t_lo + (0.05 + 0.6 * u) * (t_hi - t_lo)
        p_r = t
        p_u = s + t
    elif label == _LABEL_R:
        mirrored = _triple_for(_LABEL_U, -score, u)
        return PolarityTriple(
            p_russia=mirrored.p_ukraine,
            p_notsure=mirrored.p_notsure,
            p_ukraine=mirrored.p_russia,
        )
    else:
        s = min(max(score, -0.3), 0.3)
        lo = (1.0 + abs(s)) / 3.0 + 1e-6
        hi = 1.0 - abs(s) - 1e-6
        p_n = lo + (0.1 + 0.8 * u) * (hi - lo)
        p_u = (1.0 - p_n + s) / 2.0
        p_r = (1.0 - p_n - s) / 2.0
        return PolarityTriple(p_russia=p_r, p_notsure=p_n, p_ukraine=p_u)
    return PolarityTriple(p_russia=p_r, p_notsure=1.0 - p_u - p_r, p_ukraine=p_u)


def _sample_pairs(
    rng: np.random.Generator, n_src: int, n_dst: int, p: float, same: bool
) -> list[tuple[int, int]]:
    """Bernoulli(p) sample over ordered (src, dst) index pairs."""
    if n_src == 0 or n_dst == 0 or p <= 0.0:
        return []
    n_pairs = n_src * (n_dst - 1) if same else n_src * n_dst
    if n_pairs <= 0:
        return []
    count = int(rng.binomial(n_pairs, p))
    if count == 0:
        return []
    idx = np.sort(rng.choice(n_pairs, size=count, replace=False))
    if same:
        src = idx // (n_dst - 1)
        off = idx % (n_dst - 1)
        dst = off + (off >= src)
    else:
        src = idx // n_dst
        dst = idx % n_dst
    return list(zip(src.tolist(), dst.tolist()))


def _bridge_quota(m_retweets: int, base_draw: int) -> tuple[int, int]:
    """Original-tweet count and per-side quota keeping both shares >= 21%."""
    n = max(int(base_draw), 2)
    while True:
        total = n + m_retweets
        q = math.ceil(0.21 * total)
        if n >= 2 * q:
            return n, q
        n = 2 * q


_TEXTS = {
    _LABEL_U: "standing with Ukraine against the invasion, update {k}",
    _LABEL_R: "supporting Russia and its course, take {k}",
    _LABEL_N: "watching the Russia Ukraine situation unfold, note {k}",
}


def generate(params: SynthParams) -> SynthResult:
    """Build the full synthetic dataset for the given parameters."""
    params.validate()
    rng = np.random.default_rng(params.seed)

    groups: list[tuple[str, str, int]] = [
        (GROUP_RUSSIA, "ru", params.n_per_block),
        (GROUP_UKRAINE, "uk", params.n_per_block),
        (GROUP_BRIDGE, "br", params.n_bridges),
        (GROUP_NEUTRAL, "nt", params.n_neutral),
    ]
    authors: list[_Author] = []
    members: dict[str, list[int]] = {g: [] for g, _, _ in groups}
    for group, prefix, count in groups:
        for i in range(count):
            followers = 0
            if rng.random() >= params.zero_follower_rate:
                followers = 1 + int(rng.lognormal(3.0, 1.0))
            authors.append(
                _Author(
                    user_id=f"{prefix}{i:05d}",
                    group=group,
                    followers=followers,
                    verified=bool(rng.random() < 0.02),
                )
            )
            members[group].append(len(authors) - 1)

    # Retweet edges: (source author, retweeter, multiplicity), sampled per
    # group pair in a fixed order.  Bridges retweet blocks and are
    # retweeted by blocks; neutral users retweet blocks at the background
    # rate; blocks cross-retweet at the background rate.
    edge_classes = [
        (GROUP_UKRAINE, GROUP_UKRAINE, params.p_intra),
        (GROUP_RUSSIA, GROUP_RUSSIA, params.p_intra),
        (GROUP_UKRAINE, GROUP_RUSSIA, params.p_inter),
        (GROUP_RUSSIA, GROUP_UKRAINE, params.p_inter),
        (GROUP_BRIDGE, GROUP_UKRAINE, params.p_bridge),
        (GROUP_BRIDGE, GROUP_RUSSIA, params.p_bridge),
        (GROUP_UKRAINE, GROUP_BRIDGE, params.p_bridge),
        (GROUP_RUSSIA, GROUP_BRIDGE, params.p_bridge),
        (GROUP_UKRAINE, GROUP_NEUTRAL, params.p_inter),
        (GROUP_RUSSIA, GROUP_NEUTRAL, params.p_inter),
    ]
    edges: list[tuple[int, int, int]] = []
    for src_group, dst_group, p in edge_classes:
        src_ids = members[src_group]
        dst_ids = members[dst_group]
        pairs = _sample_pairs(
            rng, len(src_ids), len(dst_ids), p, same=(src_group == dst_group)
        )
        if not pairs:
            continue
        mults = rng.geometric(params.weight_law, size=len(pairs))
        for (si, di), w in zip(pairs, mults):
            edges.append((src_ids[si], dst_ids[di], int(w)))

    tweets: list[TweetRecord] = []
    probs: dict[str, PolarityTriple] = {}
    text_of: dict[str, str] = {}
    tweet_seq = 0

    def emit_original(author: _Author, label: int) -> None:
        nonlocal tweet_seq
        tid = f"t{tweet_seq:08d}"
        tweet_seq += 1
        if label == _LABEL_U:
            score = float(
                np.clip(rng.normal(params.polarity_center, params.polarity_noise),
                        0.05, 0.999)
            )
        elif label == _LABEL_R:
            score = float(
                np.clip(rng.normal(-params.polarity_center, params.polarity_noise),
                        -0.999, -0.05)
            )
        else:
            score = float(np.clip(rng.normal(0.0, params.polarity_noise / 2.0),
                                  -0.25, 0.25))
        triple = _triple_for(label, score, float(rng.random()))
        shift = params.engagement_shift.get(author.group, 1.0)
        rt_mean = params.retweet_mean * shift
        like_mean = params.like_mean * shift
        shape = params.engagement_shape
        rt_count = int(rng.negative_binomial(shape, shape / (shape + rt_mean)))
        like_count = int(rng.negative_binomial(shape, shape / (shape + like_mean)))
        probs[tid] = triple
        text_of[tid] = _TEXTS[label].format(k=tweet_seq)
        tweets.append(
            TweetRecord(
                tweet_id=tid,
                author_id=author.user_id,
                text=text_of[tid],
                retweet_count=rt_count,
                like_count=like_count,
                referenced_tweet_id=None,
                author_followers=author.followers,
                verified=author.verified,
            )
        )
        author.tweet_ids.append(tid)
        author.tweets_by_label.setdefault(label, []).append(len(author.tweet_ids) - 1)

    # Originals for block and neutral users.  Block users author their own
    # side plus occasional not-sure tweets (guaranteed one when they have
    # room for it, so cross-block retweets usually find neutral content).
    for group in (GROUP_RUSSIA, GROUP_UKRAINE, GROUP_NEUTRAL):
        side = {GROUP_RUSSIA: _LABEL_R, GROUP_UKRAINE: _LABEL_U}.get(group, _LABEL_N)
        for ai in members[group]:
            author = authors[ai]
            n = int(rng.geometric(params.tweets_per_user_law))
            if group == GROUP_NEUTRAL:
                labels = [_LABEL_N] * n
            else:
                labels = [side]
                if n >= 2:
                    labels.append(_LABEL_N)
                for _ in range(n - len(labels)):
                    labels.append(
                        _LABEL_N if rng.random() < params.block_notsure_rate else side
                    )
            for label in labels:
                emit_original(author, label)

    # Resolve bridge-made retweets first: bridges only relay not-sure
    # content, and an edge is dropped when the source has none.  The
    # surviving totals size each bridge's own output so the 20% rule holds
    # no matter how much they retweet.
    bridge_set = {authors[i].user_id for i in members[GROUP_BRIDGE]}
    bridge_retweets: dict[int, int] = {i: 0 for i in members[GROUP_BRIDGE]}
    kept_edges: list[tuple[int, int, int]] = []
    for src, dst, w in edges:
        retweeter = authors[dst]
        if retweeter.group in (GROUP_BRIDGE, GROUP_NEUTRAL):
            if not authors[src].tweets_by_label.get(_LABEL_N):
                continue
            if retweeter.group == GROUP_BRIDGE:
                bridge_retweets[dst] += w
        kept_edges.append((src, dst, w))

    for ai in members[GROUP_BRIDGE]:
        author = authors[ai]
        base = max(5, int(rng.geometric(params.tweets_per_user_law)) + 4)
        n, quota = _bridge_quota(bridge_retweets[ai], base)
        labels = [_LABEL_R] * quota + [_LABEL_U] * quota + [_LABEL_N] * (n - 2 * quota)
        for label in labels:
            emit_original(author, label)

    # Emit retweet records.  Each multiplicity unit independently picks a
    # source tweet under the retweeter's selection rule.
    def pick_source_tweet(source: _Author, retweeter: _Author) -> int | None:
        by_label = source.tweets_by_label
        if retweeter.group in (GROUP_BRIDGE, GROUP_NEUTRAL):
            pool = by_label.get(_LABEL_N)
            if not pool:
                return None
            return pool[int(rng.integers(len(pool)))]
        own = _LABEL_R if retweeter.group == GROUP_RUSSIA else _LABEL_U
        own_pool = by_label.get(own)
        neutral_pool = by_label.get(_LABEL_N)
        if own_pool and (not neutral_pool or rng.random() < params.content_preference):
            return own_pool[int(rng.integers(len(own_pool)))]
        if neutral_pool:
            return neutral_pool[int(rng.integers(len(neutral_pool)))]
        return None

    for src, dst, w in kept_edges:
        source = authors[src]
        retweeter = authors[dst]
        shift = params.engagement_shift.get(retweeter.group, 1.0)
        shape = params.engagement_shape
        for _ in range(w):
            pick = pick_source_tweet(source, retweeter)
            if pick is None:
                break
            src_tid = source.tweet_ids[pick]
            tid = f"r{tweet_seq:08d}"
            tweet_seq += 1
            probs[tid] = probs[src_tid]
            rt_mean = params.retweet_mean * shift
            like_mean = params.like_mean * shift
            tweets.append(
                TweetRecord(
                    tweet_id=tid,
                    author_id=retweeter.user_id,
                    text=f"RT @{source.user_id}: " + text_of[src_tid],
                    retweet_count=int(
                        rng.negative_binomial(shape, shape / (shape + rt_mean))
                    ),
                    like_count=int(
                        rng.negative_binomial(shape, shape / (shape + like_mean))
                    ),
                    referenced_tweet_id=src_tid,
                    author_followers=retweeter.followers,
                    verified=retweeter.verified,
                )
            )

    gt = GroundTruth(
        group_of={a.user_id: a.group for a in authors},
        bridges=bridge_set,
        block_russia=[authors[i].user_id for i in members[GROUP_RUSSIA]],
        block_ukraine=[authors[i].user_id for i in members[GROUP_UKRAINE]],
        neutral=[authors[i].user_id for i in members[GROUP_NEUTRAL]],
        seed=params.seed,
    )
    return SynthResult(tweets=tweets, probs=probs, ground_truth=gt)


def describe(gt: GroundTruth) -> dict:
    """Planted structure summary: block sizes, bridges, expected outcomes."""
    return {
        "blocks": {
            GROUP_RUSSIA: len(gt.block_russia),
            GROUP_UKRAINE: len(gt.block_ukraine),
        },
        "bridges": len(gt.bridges),
        "neutral": len(gt.neutral),
        "expected_bipartisan": len(gt.bridges),
        "expected_homophily": "positive g_u vs neighborhood correlation",
        "seed": gt.seed,
    }


def params_to_dict(params: SynthParams) -> dict:
    return asdict(params)


def params_from_dict(raw: dict) -> SynthParams:
    params = SynthParams()
    for key, value in raw.items():
        if not hasattr(params, key):
            raise DomainError(f"unknown synth parameter: {key}")
        if key == "engagement_shift":
            params.engagement_shift = {str(k): float(v) for k, v in value.items()}
        elif isinstance(getattr(params, key), int) and not isinstance(
            getattr(params, key), bool
        ):
            setattr(params, key, int(value))
        else:
            setattr(params, key, float(value))
    return params
