import itertools
from functools import lru_cache

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tennisgt.prob_core import DomainError, PointProbs
from tennisgt.tiebreak import (
    A_WINS,
    B_WINS,
    DECISIVE,
    TABLE,
    oracle_by_own_serve_points,
    point_server,
    sudden_death_oracle,
    sudden_death_win_prob,
    table_terms,
    tiebreak_dist_oracle,
    tiebreak_score_dist,
    tiebreak_win_prob,
    tiebreak_win_prob_b,
    tiebreak_win_prob_oracle,
)

prob = st.floats(min_value=0.02, max_value=0.98)
pairs = st.builds(PointProbs, prob, prob)
GRID = [round(0.1 * i, 1) for i in range(1, 10)]


def recursive_tiebreak(pp: PointProbs, first: str = "A"):
    """Point-by-point recursion, written independently of the package.

    Returns (win probability of A, dict of regulation end scores, P(6-6)).
    """

    def a_takes(k):
        return pp.p if point_server(k, first) == "A" else 1 - pp.q

    @lru_cache(maxsize=None)
    def win(a, b):
        if a >= 7 and a - b >= 2:
            return 1.0
        if b >= 7 and b - a >= 2:
            return 0.0
        if a > 60:  # deep in sudden death; the tail is negligible
            return 0.5
        w = a_takes(a + b)
        return w * win(a + 1, b) + (1 - w) * win(a, b + 1)

    reach = {(0, 0): 1.0}
    ends = {}
    for k in range(12):
        nxt = {}
        for (a, b), pr in reach.items():
            w = a_takes(k)
            for s, m in (((a + 1, b), w), ((a, b + 1), 1 - w)):
                if 7 in s:
                    ends[s] = ends.get(s, 0.0) + pr * m
                else:
                    nxt[s] = nxt.get(s, 0.0) + pr * m
        reach = nxt
    return win(0, 0), ends, reach.get((6, 6), 0.0)


def test_abba_order():
    assert "".join(point_server(k) for k in range(8)) == "ABBAABBA"
    assert "".join(point_server(k, "B") for k in range(8)) == "BAABBAAB"


@pytest.mark.parametrize("p,q", [(0.5, 0.5), (0.7, 0.6), (0.9, 0.2), (0.3, 0.8)])
def test_against_independent_recursion(p, q):
    pp = PointProbs(p, q)
    w, ends, tied = recursive_tiebreak(pp)
    d = tiebreak_score_dist(pp)
    for s in DECISIVE:
        assert d[s] == pytest.approx(ends[s], abs=1e-14)
    assert d.tied == pytest.approx(tied, abs=1e-14)
    assert tiebreak_win_prob(pp) == pytest.approx(w, abs=1e-12)


def test_known_values():
    half = tiebreak_score_dist(PointProbs(0.5, 0.5))
    assert half[(7, 0)] == pytest.approx(0.5**7)
    assert half[(6, 6)] == pytest.approx(924 * 0.5**12)
    pp = PointProbs(0.7, 0.6)
    assert sudden_death_win_prob(pp) == pytest.approx(0.6086956521739132, abs=1e-15)
    assert tiebreak_win_prob(pp) == pytest.approx(0.6629731827478261, abs=1e-14)


def test_table_covers_every_decisive_score():
    assert set(TABLE) == set(DECISIVE)
    assert len(A_WINS) == len(B_WINS) == 6


@pytest.mark.parametrize("p,q", list(itertools.product([0.2, 0.5, 0.8], repeat=2)))
def test_each_summand_matches_enumeration(p, q):
    pp = PointProbs(p, q)
    terms = table_terms(pp)
    ref = oracle_by_own_serve_points(pp)
    for key, v in ref.items():
        assert terms.get(key, 0.0) == pytest.approx(v, abs=1e-14), key


@pytest.mark.parametrize("p,q", list(itertools.product(GRID, repeat=2)))
def test_closed_form_equals_enumeration_on_grid(p, q):
    pp = PointProbs(p, q)
    assert tiebreak_score_dist(pp).max_deviation(tiebreak_dist_oracle(pp)) < 1e-10
    assert abs(sudden_death_win_prob(pp) - sudden_death_oracle(pp)) < 1e-10
    assert abs(tiebreak_win_prob(pp) - tiebreak_win_prob_oracle(pp)) < 1e-10


@given(pairs)
def test_distribution_sums_to_one(pp):
    assert abs(tiebreak_score_dist(pp).total() - 1) < 1e-12
    assert abs(tiebreak_score_dist(pp, "B").total() - 1) < 1e-12


@given(pairs)
def test_complement(pp):
    assert abs(tiebreak_win_prob(pp) + tiebreak_win_prob_b(pp) - 1) < 1e-12


@given(pairs)
def test_relabeling(pp):
    # swapping the players (and hence who serves first) mirrors every score
    mirrored = tiebreak_score_dist(pp).reversed()
    assert mirrored.max_deviation(tiebreak_dist_oracle(pp.swapped(), "B")) < 1e-12


@given(pairs)
def test_first_server_does_not_change_win_prob(pp):
    assert abs(tiebreak_win_prob(pp, "A") - tiebreak_win_prob(pp, "B")) < 1e-12
    assert abs(sudden_death_oracle(pp, "A") - sudden_death_oracle(pp, "B")) < 1e-12


@given(prob)
def test_equal_skill_is_fair(p):
    assert abs(tiebreak_win_prob(PointProbs(p, p)) - 0.5) < 1e-12


def test_first_server_validated():
    with pytest.raises(DomainError):
        tiebreak_score_dist(PointProbs(0.5, 0.5), "C")
