from __future__ import annotations

import random

import pytest

from stanceclf.data import AnnotatedTweet

_VOCAB = {
    "pro-Russia": ["kremlin", "moscow", "donbas", "liberation", "nato provoked", "sanctions backfire"],
    "pro-Ukraine": ["kyiv", "slava", "resistance", "defend freedom", "stand with ukraine", "sunflowers"],
    "not-sure": ["unclear", "confusing", "watching", "developing story", "hard to tell", "mixed reports"],
}
_FILLER = ["today", "again", "situation", "frontline", "report", "thread", "update", "news"]


def make_corpus(n: int, seed: int = 0) -> list[AnnotatedTweet]:
    """Synthetic separable corpus: class vocabulary plus shared filler."""
    rng = random.Random(seed)
    labels = list(_VOCAB)
    out = []
    for i in range(n):
        label = labels[i % 3]
        words = rng.sample(_VOCAB[label], k=2) + rng.sample(_FILLER, k=3)
        rng.shuffle(words)
        out.append(
            AnnotatedTweet(tweet_id=f"a{i:05d}", text=" ".join(words), label=label)
        )
    return out


@pytest.fixture(scope="session")
def corpus600():
    return make_corpus(600, seed=1)


SMALL_GRID = {
    "embeddings": ["tfidf"],
    "algorithms": {
        "logreg": {"clf__C": [1.0]},
        "naive_bayes": {"clf__alpha": [1.0]},
    },
}
