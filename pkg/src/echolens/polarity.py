"""Tweet and user polarity scoring, labelling, and user categorization.

Scores live on a [-1, 1] axis: -1 pro-Russia, 0 not-sure, +1 pro-Ukraine.
A tweet's score is the expectation of that encoding under the classifier
probabilities, which reduces to ``p_ukraine - p_russia``.  A user's score
is the plain mean of their tweets' scores.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Mapping, Sequence

from .errors import DomainError
from .ingest import PolarityTriple, TweetRecord


class PolarityLabel(IntEnum):
    PRO_RUSSIA = -1
    NOT_SURE = 0
    PRO_UKRAINE = 1


class Category:
    BIPARTISAN = "Bipartisan"
    PRO_RUSSIA = "ProRussiaPartisan"
    PRO_UKRAINE = "ProUkrainePartisan"
    NOT_SURE = "NotSure"
    UNCLASSIFIED = "Unclassified"

    ALL = (BIPARTISAN, PRO_RUSSIA, PRO_UKRAINE, NOT_SURE, UNCLASSIFIED)
    PARTISAN = (PRO_RUSSIA, PRO_UKRAINE)


@dataclass
class UserProfile:
    user_id: str
    g_u: float
    n_tweets: int
    count_russia: int
    count_notsure: int
    count_ukraine: int
    followers: int
    verified: bool
    category: str


def tweet_score(p: PolarityTriple) -> float:
    """Expected polarity of a tweet: sum of label value times probability."""
    return p.p_ukraine - p.p_russia


def tweet_label(p: PolarityTriple) -> PolarityLabel:
    """Argmax label; ties resolve to not-sure first, then pro-Russia."""
    best = max(p.p_russia, p.p_notsure, p.p_ukraine)
    if p.p_notsure == best:
        return PolarityLabel.NOT_SURE
    if p.p_russia == best:
        return PolarityLabel.PRO_RUSSIA
    return PolarityLabel.PRO_UKRAINE


def user_score(scores: Sequence[float]) -> float:
    if len(scores) == 0:
        raise DomainError("user_score needs at least one tweet score")
    return sum(scores) / len(scores)


def categorize_user(
    count_russia: int,
    count_notsure: int,
    count_ukraine: int,
    threshold: float = 0.2,
) -> str:
    """Assign a user category from per-label tweet counts.

    Users with at most one tweet stay Unclassified.  A user reaching the
    threshold share on both sides is Bipartisan; on exactly one side,
    partisan for that side; otherwise NotSure.  The comparison is done in
    integers when the threshold is the 0.2 default, so boundary cases like
    1-out-of-5 are exact.
    """
    if min(count_russia, count_notsure, count_ukraine) < 0:
        raise DomainError("tweet counts must be nonnegative")
    total = count_russia + count_notsure + count_ukraine
    if total <= 1:
        return Category.UNCLASSIFIED
    if threshold == 0.2:
        russia_hit = 5 * count_russia >= total
        ukraine_hit = 5 * count_ukraine >= total
    else:
        russia_hit = count_russia / total >= threshold
        ukraine_hit = count_ukraine / total >= threshold
    if russia_hit and ukraine_hit:
        return Category.BIPARTISAN
    if russia_hit:
        return Category.PRO_RUSSIA
    if ukraine_hit:
        return Category.PRO_UKRAINE
    return Category.NOT_SURE


def profile_users(
    pairs: Iterable[tuple[TweetRecord, PolarityTriple]],
    threshold: float = 0.2,
) -> dict[str, UserProfile]:
    """Aggregate scored tweets into per-user profiles.

    Follower count and verified flag are carried from the user's latest
    record (input order; timestamps are not required to be present).
    """
    sums: dict[str, float] = {}
    counts: dict[str, list[int]] = {}
    meta: dict[str, tuple[int, bool]] = {}
    for rec, triple in pairs:
        uid = rec.author_id
        sums[uid] = sums.get(uid, 0.0) + tweet_score(triple)
        c = counts.setdefault(uid, [0, 0, 0])
        c[tweet_label(triple) + 1] += 1
        meta[uid] = (rec.author_followers, rec.verified)

    profiles: dict[str, UserProfile] = {}
    for uid, (n_r, n_n, n_u) in counts.items():
        n = n_r + n_n + n_u
        followers, verified = meta[uid]
        profiles[uid] = UserProfile(
            user_id=uid,
            g_u=sums[uid] / n,
            n_tweets=n,
            count_russia=n_r,
            count_notsure=n_n,
            count_ukraine=n_u,
            followers=followers,
            verified=verified,
            category=categorize_user(n_r, n_n, n_u, threshold=threshold),
        )
    return profiles


PROFILE_COLUMNS = (
    "user_id",
    "g_u",
    "n_tweets",
    "count_russia",
    "count_notsure",
    "count_ukraine",
    "followers",
    "verified",
    "category",
)


def write_profiles(profiles: Mapping[str, UserProfile], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(PROFILE_COLUMNS)
        for uid in sorted(profiles):
            p = profiles[uid]
            w.writerow(
                [
                    p.user_id,
                    repr(p.g_u),
                    p.n_tweets,
                    p.count_russia,
                    p.count_notsure,
                    p.count_ukraine,
                    p.followers,
                    int(p.verified),
                    p.category,
                ]
            )


def read_profiles(path: str) -> dict[str, UserProfile]:
    profiles: dict[str, UserProfile] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            profiles[row["user_id"]] = UserProfile(
                user_id=row["user_id"],
                g_u=float(row["g_u"]),
                n_tweets=int(row["n_tweets"]),
                count_russia=int(row["count_russia"]),
                count_notsure=int(row["count_notsure"]),
                count_ukraine=int(row["count_ukraine"]),
                followers=int(row["followers"]),
                verified=bool(int(row["verified"])),
                category=row["category"],
            )
    return profiles


def scores_of(profiles: Mapping[str, UserProfile]) -> dict[str, float]:
    """Convenience view: user_id -> g_u."""
    return {uid: p.g_u for uid, p in profiles.items()}
