from __future__ import annotations

import pytest

from echolens.ingest import PolarityTriple, TweetRecord
from echolens.synth import SynthParams, generate


def triple(p_r: float, p_n: float, p_u: float) -> PolarityTriple:
    return PolarityTriple(p_russia=p_r, p_notsure=p_n, p_ukraine=p_u)


def record(tweet_id: str, author: str, ref: str | None = None, **kw) -> TweetRecord:
    return TweetRecord(
        tweet_id=tweet_id,
        author_id=author,
        text=kw.pop("text", "on Ukraine and Russia"),
        referenced_tweet_id=ref,
        **kw,
    )


@pytest.fixture(scope="session")
def small_synth():
    """Shared small synthetic dataset (blocks of 300, 30 bridges)."""
    params = SynthParams(n_per_block=300, n_bridges=30, n_neutral=30, seed=9)
    return generate(params)


@pytest.fixture(scope="session")
def small_pairs(small_synth):
    tweets, probs, _ = small_synth
    return [(rec, probs[rec.tweet_id]) for rec in tweets]
