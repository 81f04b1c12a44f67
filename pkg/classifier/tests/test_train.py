from __future__ import annotations

import pytest

from stanceclf.data import AnnotatedTweet, DataError, load_annotations
from stanceclf.preprocess import preprocess_text
from stanceclf.train import ModelCard, load_grid, train

from conftest import SMALL_GRID, make_corpus


class TestPreprocess:
    def test_matches_downstream_rules(self):
        assert (
            preprocess_text("RT @foo: Hello!! \U0001F600 http://x.co #StopRussia")
            == "Hello StopRussia"
        )

    def test_idempotent(self):
        s = preprocess_text("@a some #tag and https://x.co link")
        assert preprocess_text(s) == s


class TestTrain:
    def test_separable_two_classes_perfect_f1(self):
        data = []
        for i in range(30):
            data.append(AnnotatedTweet(f"r{i}", "kremlin moscow donbas", "pro-Russia"))
            data.append(AnnotatedTweet(f"u{i}", "kyiv slava resistance", "pro-Ukraine"))
        result = train(data, grid=SMALL_GRID, seed=0)
        assert result.best_card.mean_f1 == pytest.approx(1.0)

    def test_deterministic_fold_scores(self):
        data = make_corpus(120, seed=5)
        a = train(data, grid=SMALL_GRID, seed=3)
        b = train(data, grid=SMALL_GRID, seed=3)
        assert [c.to_dict() for c in a.cards] == [c.to_dict() for c in b.cards]

    def test_single_class_rejected(self):
        data = [AnnotatedTweet(f"t{i}", "kremlin", "pro-Russia") for i in range(10)]
        with pytest.raises(DataError, match="single class"):
            train(data, grid=SMALL_GRID)

    def test_empty_grid_rejected(self):
        data = make_corpus(30)
        with pytest.raises(DataError):
            train(data, grid={"embeddings": [], "algorithms": {}})

    def test_every_grid_cell_gets_a_card(self):
        data = make_corpus(90, seed=2)
        result = train(data, grid=SMALL_GRID, seed=1)
        assert len(result.cards) == 2
        combos = {(c.embedding, c.algorithm) for c in result.cards}
        assert combos == {("tfidf", "logreg"), ("tfidf", "naive_bayes")}
        assert result.best_card.mean_f1 == max(c.mean_f1 for c in result.cards)


class TestModelCard:
    def test_mean_must_match_folds(self):
        with pytest.raises(ValueError):
            ModelCard("tfidf", "svm", {}, [0.5, 0.7], mean_f1=0.9)

    def test_five_folds_recorded(self):
        result = train(make_corpus(100, seed=7), grid=SMALL_GRID, seed=2)
        for card in result.cards:
            assert len(card.fold_f1) == 5


class TestLoaders:
    def test_load_annotations_roundtrip(self, tmp_path):
        path = tmp_path / "ann.csv"
        path.write_text(
            "tweet_id,text,label\nt1,kremlin speech,pro-Russia\nt2,kyiv stands,pro-Ukraine\n"
        )
        data = load_annotations(str(path))
        assert len(data) == 2 and data[0].label == "pro-Russia"

    def test_bad_label_rejected(self, tmp_path):
        path = tmp_path / "ann.csv"
        path.write_text("tweet_id,text,label\nt1,foo,maybe\n")
        with pytest.raises(DataError):
            load_annotations(str(path))

    def test_grid_file_validation(self, tmp_path):
        path = tmp_path / "grid.json"
        path.write_text('{"embeddings": [], "algorithms": {}}')
        with pytest.raises(DataError):
            load_grid(str(path))
