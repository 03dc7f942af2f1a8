import itertools
import time
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tennisgt.match_model import (
    BEST_OF_3,
    BEST_OF_5,
    InvalidSequenceError,
    MatchFormat,
    SetSequence,
    enumerate_sequences,
    gt_census,
    gt_probability,
    gt_probability_scan,
    is_gt,
    match_outcome_probs_oracle,
    match_win_prob,
    probability_grid,
    sequence_probability,
)
from tennisgt.prob_core import DomainError, PointProbs
from tennisgt.set_model import SET_SCORES, SetScore, set_dist_oracle, set_score_dist

prob = st.floats(min_value=0.05, max_value=0.95)
pairs = st.builds(PointProbs, prob, prob)


def count_by_length(best_of: int):
    """Closed count: the final set is the winner's, the rest any order."""
    need = best_of // 2 + 1
    out = {}
    for n in range(need, best_of + 1):
        losses = n - need
        out[n] = 2 * 7**n * len(list(itertools.combinations(range(n - 1), losses)))
    return out


@pytest.mark.parametrize("fmt", [BEST_OF_3, BEST_OF_5])
def test_sequence_counts_match_combinatorics(fmt):
    census = gt_census(fmt)
    assert census.counts == count_by_length(fmt.best_of)


def test_census_values():
    bo3, bo5 = gt_census(BEST_OF_3), gt_census(BEST_OF_5)
    assert bo3.counts == {2: 98, 3: 1372} and bo3.total == 1470
    assert bo5.counts == {3: 686, 4: 14406, 5: 201684} and bo5.total == 216776
    assert bo3.gt_counts == {2: 0, 3: 136} and bo3.gt == 136
    assert bo5.gt_counts == {3: 0, 4: 180, 5: 32124} and bo5.gt == 32304


def test_sequences_unique_and_terminal():
    seqs = [s.sets for s in enumerate_sequences(BEST_OF_3)]
    assert len(seqs) == len(set(seqs))
    for s in seqs:
        assert is_gt(SetSequence(s)) == is_gt(SetSequence(s, BEST_OF_3))


def test_gt_is_strict():
    assert not is_gt(SetSequence(((6, 4), (4, 6), (6, 4))))  # 16-14
    assert is_gt(SetSequence(((0, 6), (7, 6), (7, 6))))  # 14-18
    assert is_gt(SetSequence(((6, 0), (0, 6), (0, 6), (6, 4), (6, 4))))  # 18-20
    level = SetSequence(((6, 7), (6, 7), (7, 6), (7, 6), (7, 6)))
    assert level.games == (33, 32) and not is_gt(level)
    # a dead heat on games is not a discrepancy
    even = SetSequence(((6, 0), (1, 6), (6, 7)))
    assert even.games == (13, 13) and even.winner == "B"
    assert not is_gt(even)


def test_b_winner_gt():
    s = SetSequence(((6, 0), (6, 7), (6, 7)))
    assert s.winner == "B" and s.games == (18, 14) and is_gt(s)


@pytest.mark.parametrize(
    "bad",
    [
        (),
        ((6, 4),),
        ((6, 4), (6, 4), (6, 4)),  # continues after a best-of-3 win, and best-of-5 unfinished
        ((6, 4), (4, 6), (6, 4), (6, 4)),
        ((6, 5), (6, 4)),
    ],
)
def test_invalid_sequences(bad):
    with pytest.raises(InvalidSequenceError):
        SetSequence(bad, BEST_OF_3)


def test_format_validation():
    assert MatchFormat(5).sets_to_win == 3
    for bad in (1, 4, 7, True):
        with pytest.raises(DomainError):
            MatchFormat(bad)


EXACT = {
    (0.5, 5): 0.047675704841470434,
    (0.6, 5): 0.0512248803642056,
    (0.75, 5): 0.05146404360983069,
    (5 / 6, 5): 0.023517260970593146,
    (0.5, 3): 0.03200934827327728,
    (0.6, 3): 0.03306626006652126,
    (0.75, 3): 0.03174718475103873,
    (5 / 6, 3): 0.01609924434652958,
}


@pytest.mark.parametrize("key", list(EXACT))
def test_gt_probability_equals_set_level_dp(key):
    p, best_of = key
    pp = PointProbs(p, p)
    fmt = MatchFormat(best_of)
    ref = match_outcome_probs_oracle(set_dist_oracle(pp), fmt)
    assert gt_probability(pp, fmt) == pytest.approx(ref["gt"], abs=1e-13)
    assert gt_probability(pp, fmt) == pytest.approx(EXACT[key], abs=1e-13)


def test_brute_force_sum_over_sequences():
    pp = PointProbs(0.62, 0.55)
    dist = set_score_dist(pp)
    for fmt in (BEST_OF_3, BEST_OF_5):
        total = gt = a_win = 0.0
        for seq in enumerate_sequences(fmt):
            pr = sequence_probability(seq, pp, dist)
            total += pr
            gt += pr if is_gt(seq) else 0.0
            a_win += pr if seq.winner == "A" else 0.0
        assert total == pytest.approx(1.0, abs=1e-12)
        assert gt_probability(pp, fmt) == pytest.approx(gt, abs=1e-13)
        assert match_win_prob(pp, fmt) == pytest.approx(a_win, abs=1e-13)


def test_worked_example_exact_rational():
    seq = SetSequence(((4, 6), (6, 0), (6, 0), (4, 6), (4, 6)))
    exact = Fraction(63, 512) ** 3 * Fraction(1, 64) ** 2
    assert sequence_probability(seq, PointProbs(0.5, 0.5)) == pytest.approx(float(exact), rel=1e-13)
    assert is_gt(seq) and seq.winner == "B"


@given(pairs)
def test_match_probabilities_sum(pp):
    ref = match_outcome_probs_oracle(set_score_dist(pp), BEST_OF_5)
    assert abs(ref["total"] - 1) < 1e-12
    assert abs(match_win_prob(pp, BEST_OF_5) - ref["a_win"]) < 1e-12


@given(prob)
def test_equal_skill_is_fair(p):
    pp = PointProbs(p, p)
    assert abs(match_win_prob(pp, BEST_OF_3) - 0.5) < 1e-10
    assert abs(match_win_prob(pp, BEST_OF_5) - 0.5) < 1e-10


@given(pairs)
def test_gt_relabeling(pp):
    # swapping the players also swaps who opens each set
    for fmt in (BEST_OF_3, BEST_OF_5):
        mirrored = match_outcome_probs_oracle(set_score_dist(pp.swapped(), "B"), fmt)
        assert abs(gt_probability(pp, fmt) - mirrored["gt"]) < 1e-12


@given(st.floats(min_value=0.05, max_value=0.95))
def test_gt_symmetric_in_p(p):
    # p -> 1-p at p = q swaps holds for breaks and mirrors every set score
    a = gt_probability(PointProbs(p, p), BEST_OF_5)
    b = gt_probability(PointProbs(1 - p, 1 - p), BEST_OF_5)
    assert abs(a - b) < 1e-12


def test_scan_peak_and_tail():
    scan = gt_probability_scan(BEST_OF_5, probability_grid(0.01))
    assert len(scan.points) == 99
    p, v = scan.argmax
    assert p == pytest.approx(0.70) and v == pytest.approx(0.05690, abs=1e-5)
    assert dict(scan.points)[0.95] < 0.01


def test_probability_grid():
    assert probability_grid(0.25) == [0.25, 0.5, 0.75]
    with pytest.raises(DomainError):
        probability_grid(0)


def test_census_runtime():
    start = time.perf_counter()
    gt_census(BEST_OF_5)
    assert time.perf_counter() - start < 10


def test_model_values_at_empirical_serve_rates():
    # 0.64 reproduces the printed 5.41; 0.58 gives 3.2854%, which rounds to 3.29
    assert gt_probability(PointProbs(0.64, 0.64), BEST_OF_5) == pytest.approx(0.054068, abs=5e-7)
    assert gt_probability(PointProbs(0.58, 0.58), BEST_OF_3) == pytest.approx(0.032854, abs=5e-7)
