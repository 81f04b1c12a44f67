"""Grid-search training over embedding x algorithm combinations.

Every combination is tuned with an exhaustive hyper-parameter grid under
stratified 5-fold cross-validation on macro F1; the winner is refit on the
full training set.  All estimators are seeded, so a rerun with the same
seed reproduces identical fold scores.

The shipped embeddings are all local (bag-of-words family); classifiers
without native probability outputs run with Platt calibration enabled so
every trained model can emit class probabilities.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import joblib
import numpy as np
from sklearn.ensemble import RandomForestClassifier
from sklearn.feature_extraction.text import (
    CountVectorizer,
    HashingVectorizer,
    TfidfVectorizer,
)
from sklearn.linear_model import LogisticRegression
from sklearn.model_selection import GridSearchCV, StratifiedKFold
from sklearn.naive_bayes import MultinomialNB
from sklearn.neighbors import KNeighborsClassifier
from sklearn.pipeline import Pipeline
from sklearn.svm import SVC
from sklearn.tree import DecisionTreeClassifier

from .data import AnnotatedTweet, DataError, class_counts
from .preprocess import preprocess_text

N_FOLDS = 5


@dataclass
class ModelCard:
    embedding: str
    algorithm: str
    params: dict
    fold_f1: list[float]
    mean_f1: float

    def __post_init__(self):
        expected = sum(self.fold_f1) / len(self.fold_f1)
        if abs(self.mean_f1 - expected) > 1e-9:
            raise ValueError("mean_f1 must equal the mean of fold scores")

    def to_dict(self) -> dict:
        return {
            "embedding": self.embedding,
            "algorithm": self.algorithm,
            "params": self.params,
            "fold_f1": self.fold_f1,
            "mean_f1": self.mean_f1,
        }


@dataclass
class TrainResult:
    best_model: Pipeline
    best_card: ModelCard
    cards: list[ModelCard] = field(default_factory=list)
    labels: list[str] = field(default_factory=list)


def _embedding(name: str):
    if name == "tfidf":
        return TfidfVectorizer(max_features=5000)
    if name == "counts":
        return CountVectorizer(max_features=5000)
    if name == "hashing":
        # alternate_sign off keeps features nonnegative for naive Bayes.
        return HashingVectorizer(n_features=2**12, alternate_sign=False)
    if name == "char_tfidf":
        return TfidfVectorizer(analyzer="char_wb", ngram_range=(2, 4), max_features=5000)
    raise DataError(f"unknown embedding: {name}")


def _algorithm(name: str, seed: int):
    if name == "svm":
        # Probability output via the built-in Platt calibration.
        return SVC(probability=True, random_state=seed)
    if name == "knn":
        return KNeighborsClassifier()
    if name == "decision_tree":
        return DecisionTreeClassifier(random_state=seed)
    if name == "random_forest":
        return RandomForestClassifier(random_state=seed)
    if name == "naive_bayes":
        return MultinomialNB()
    if name == "logreg":
        return LogisticRegression(max_iter=2000, random_state=seed)
    raise DataError(f"unknown algorithm: {name}")


DEFAULT_GRID: dict = {
    "embeddings": ["tfidf", "counts", "hashing", "char_tfidf"],
    "algorithms": {
        "svm": {"clf__C": [1.0, 10.0]},
        "knn": {"clf__n_neighbors": [3, 5]},
        "decision_tree": {"clf__max_depth": [None, 20]},
        "random_forest": {"clf__n_estimators": [50]},
        "naive_bayes": {"clf__alpha": [0.5, 1.0]},
        "logreg": {"clf__C": [1.0, 10.0]},
    },
}


def load_grid(path: str | None) -> dict:
    if path is None:
        return DEFAULT_GRID
    with open(path, encoding="utf-8") as fh:
        grid = json.load(fh)
    if not grid.get("embeddings") or not grid.get("algorithms"):
        raise DataError("grid file needs nonempty 'embeddings' and 'algorithms'")
    return grid


def train(
    annotated: list[AnnotatedTweet],
    grid: dict | None = None,
    seed: int = 0,
) -> TrainResult:
    """Evaluate every embedding x algorithm cell; return the best model."""
    grid = grid or DEFAULT_GRID
    if not grid.get("embeddings") or not grid.get("algorithms"):
        raise DataError("empty grid")
    counts = class_counts(annotated)
    if len(counts) < 2:
        raise DataError(f"training data has a single class: {sorted(counts)}")
    if min(counts.values()) < 2:
        raise DataError("every class needs at least 2 examples")

    texts = [preprocess_text(t.text) for t in annotated]
    labels = [t.label for t in annotated]
    folds = StratifiedKFold(n_splits=N_FOLDS, shuffle=True, random_state=seed)

    cards: list[ModelCard] = []
    best: tuple[float, str, str] | None = None
    best_model: Pipeline | None = None
    for emb_name in grid["embeddings"]:
        for algo_name, param_grid in grid["algorithms"].items():
            pipe = Pipeline(
                [("vec", _embedding(emb_name)), ("clf", _algorithm(algo_name, seed))]
            )
            search = GridSearchCV(
                pipe,
                param_grid or {},
                scoring="f1_macro",
                cv=folds,
                refit=True,
                n_jobs=1,
            )
            search.fit(texts, labels)
            idx = search.best_index_
            fold_scores = [
                float(search.cv_results_[f"split{i}_test_score"][idx])
                for i in range(N_FOLDS)
            ]
            card = ModelCard(
                embedding=emb_name,
                algorithm=algo_name,
                params={k: v for k, v in search.best_params_.items()},
                fold_f1=fold_scores,
                mean_f1=float(np.mean(fold_scores)),
            )
            cards.append(card)
            key = (card.mean_f1, emb_name, algo_name)
            if best is None or card.mean_f1 > best[0]:
                best = key
                best_model = search.best_estimator_

    assert best_model is not None
    best_card = max(cards, key=lambda c: c.mean_f1)
    return TrainResult(
        best_model=best_model,
        best_card=best_card,
        cards=cards,
        labels=sorted(set(labels)),
    )


def save_model(result: TrainResult, path: str) -> None:
    joblib.dump({"model": result.best_model, "card": result.best_card.to_dict()}, path)


def load_model(path: str):
    payload = joblib.load(path)
    return payload["model"], payload["card"]
