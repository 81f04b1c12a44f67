from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from echolens.errors import DomainError
from echolens.polarity import (
    Category,
    PolarityLabel,
    categorize_user,
    profile_users,
    tweet_label,
    tweet_score,
    user_score,
)

from conftest import record, triple
from oracles import categorize_reference, mean_reference


@st.composite
def triples(draw):
    a = draw(st.floats(0, 1))
    b = draw(st.floats(0, 1 - a))
    return triple(a, b, 1 - a - b)


class TestTweetScore:
    def test_pure_pro_russia(self):
        assert tweet_score(triple(1, 0, 0)) == -1

    def test_symmetry(self):
        assert tweet_score(triple(1 / 3, 1 / 3, 1 / 3)) == 0

    def test_mixed(self):
        assert tweet_score(triple(0.2, 0.3, 0.5)) == pytest.approx(0.3, abs=1e-15)

    @given(triples())
    def test_equals_expectation_and_range(self, p):
        s = tweet_score(p)
        assert s == p.p_ukraine - p.p_russia
        assert -1.0 <= s <= 1.0

    @given(st.floats(0.0, 0.5), st.floats(0.0, 0.4))
    def test_invariant_to_notsure_mass(self, diff, shift):
        # Same p_ukraine - p_russia, different p_notsure.
        base = triple(0.1, 0.8 - diff, 0.1 + diff)
        moved = triple(0.1 + shift / 2, 0.8 - diff - shift, 0.1 + diff + shift / 2)
        assert tweet_score(base) == pytest.approx(tweet_score(moved), abs=1e-12)


class TestTweetLabel:
    def test_argmax_russia(self):
        assert tweet_label(triple(0.7, 0.2, 0.1)) is PolarityLabel.PRO_RUSSIA

    def test_tie_goes_to_notsure(self):
        assert tweet_label(triple(0.4, 0.4, 0.2)) is PolarityLabel.NOT_SURE

    def test_argmax_ukraine(self):
        assert tweet_label(triple(0.1, 0.2, 0.7)) is PolarityLabel.PRO_UKRAINE

    def test_side_tie_prefers_lexicographic_first(self):
        assert tweet_label(triple(0.45, 0.1, 0.45)) is PolarityLabel.PRO_RUSSIA


class TestUserScore:
    def test_singleton(self):
        assert user_score([1.0]) == 1.0

    def test_symmetry(self):
        assert user_score([1.0, -1.0]) == 0.0

    def test_mean(self):
        assert user_score([0.6, 0.0, 0.3]) == pytest.approx(0.3)

    def test_empty_is_domain_error(self):
        with pytest.raises(DomainError):
            user_score([])


class TestCategorizeUser:
    def test_bipartisan_both_sides_30pct(self):
        assert categorize_user(3, 4, 3) == Category.BIPARTISAN

    def test_one_side_partisan(self):
        assert categorize_user(0, 1, 9) == Category.PRO_UKRAINE

    def test_single_tweet_unclassified(self):
        assert categorize_user(1, 0, 0) == Category.UNCLASSIFIED

    def test_neither_side_reaches_threshold(self):
        assert categorize_user(1, 8, 1) == Category.NOT_SURE

    def test_exact_boundary_counts(self):
        # exactly 20% on both sides is bipartisan
        assert categorize_user(1, 3, 1) == Category.BIPARTISAN

    def test_negative_counts_rejected(self):
        with pytest.raises(DomainError):
            categorize_user(-1, 2, 3)

    @given(
        st.integers(0, 30), st.integers(0, 30), st.integers(0, 30), st.integers(1, 5)
    )
    def test_scaling_invariance(self, r, n, u, k):
        if r + n + u <= 1:
            return
        assert categorize_user(r, n, u) == categorize_user(k * r, k * n, k * u)

    @given(st.integers(0, 40), st.integers(0, 40), st.integers(0, 40))
    def test_matches_reference_rule(self, r, n, u):
        assert categorize_user(r, n, u) == categorize_reference(r, n, u)


class TestProfileUsers:
    def test_composition(self):
        pairs = [
            (record("t1", "u"), triple(0.1, 0.2, 0.7)),   # score 0.6, label U
            (record("t2", "u"), triple(0.2, 0.6, 0.2)),   # score 0.0, label N
            (record("t3", "u"), triple(0.1, 0.4, 0.5)),   # score 0.4, label U
        ]
        profiles = profile_users(pairs)
        p = profiles["u"]
        assert p.g_u == pytest.approx((0.6 + 0.0 + 0.4) / 3)
        assert (p.count_russia, p.count_notsure, p.count_ukraine) == (0, 1, 2)
        assert p.category == Category.PRO_UKRAINE

    def test_bipartisan_40_40(self):
        labels = [
            triple(0.8, 0.1, 0.1),
            triple(0.1, 0.1, 0.8),
            triple(0.8, 0.1, 0.1),
            triple(0.1, 0.1, 0.8),
            triple(0.1, 0.8, 0.1),
        ]
        pairs = [(record(f"t{i}", "u"), t) for i, t in enumerate(labels)]
        assert profile_users(pairs)["u"].category == Category.BIPARTISAN

    def test_empty_input(self):
        assert profile_users([]) == {}

    def test_meta_from_latest_record(self):
        pairs = [
            (record("t1", "u", author_followers=5, verified=False), triple(0.1, 0.2, 0.7)),
            (record("t2", "u", author_followers=9, verified=True), triple(0.1, 0.2, 0.7)),
        ]
        p = profile_users(pairs)["u"]
        assert p.followers == 9 and p.verified is True

    def test_counts_sum_and_gu_matches_bruteforce(self, small_pairs):
        profiles = profile_users(small_pairs)
        by_user: dict[str, list[float]] = {}
        for rec, t in small_pairs:
            by_user.setdefault(rec.author_id, []).append(t.p_ukraine - t.p_russia)
        for uid, p in profiles.items():
            assert p.count_russia + p.count_notsure + p.count_ukraine == p.n_tweets
            assert p.g_u == pytest.approx(mean_reference(by_user[uid]), abs=1e-12)
            assert -1.0 <= p.g_u <= 1.0

    def test_bipartisan_implies_tweets_on_both_sides(self, small_pairs):
        for p in profile_users(small_pairs).values():
            if p.category == Category.BIPARTISAN:
                assert p.count_russia >= 1 and p.count_ukraine >= 1
