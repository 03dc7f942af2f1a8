import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tennisgt.prob_core import (
    ConvergenceError,
    DomainError,
    PointProbs,
    check_prob,
    deuce_win_prob,
    game_win_prob,
    game_win_prob_oracle,
    pre_deuce_state_dist,
    solve_absorbing,
)

probs = st.floats(min_value=1e-3, max_value=1 - 1e-3)


def brute_force_game(p: Fraction) -> Fraction:
    """Exact game value by explicit summation over score paths (rational)."""
    q = 1 - p
    win = p**4 * (1 + 4 * q + 10 * q**2)
    deuce = 20 * p**3 * q**3
    return win + deuce * p**2 / (1 - 2 * p * q)


@pytest.mark.parametrize("p", [Fraction(1, 2), Fraction(3, 5), Fraction(3, 4), Fraction(5, 6), Fraction(1, 10)])
def test_game_matches_rational_summation(p):
    assert game_win_prob(float(p)) == pytest.approx(float(brute_force_game(p)), abs=1e-15)


def test_known_values():
    assert game_win_prob(0.5) == pytest.approx(0.5, abs=1e-15)
    assert game_win_prob(0.75) == pytest.approx(0.94921875, abs=1e-15)
    assert game_win_prob(0.6) == pytest.approx(0.7357292307692308, abs=1e-15)


@given(probs)
def test_closed_form_equals_chain(p):
    assert abs(game_win_prob(p) - game_win_prob_oracle(p)) < 1e-12


@given(probs)
def test_relabel(p):
    assert abs(game_win_prob(p) + game_win_prob(1 - p) - 1) < 1e-12


@given(st.floats(min_value=0.01, max_value=0.98))
def test_monotone(p):
    assert game_win_prob(p + 0.01) > game_win_prob(p)


@given(probs)
def test_pre_deuce_decomposition(p):
    d = pre_deuce_state_dist(p)
    assert set(d) == {2, 1, 0, -1, -2}
    assert abs(sum(d.values()) - 1) < 1e-12
    recomposed = d[2] + sum(d[r] * deuce_win_prob(p, r) for r in (1, 0, -1))
    assert abs(recomposed - game_win_prob(p)) < 1e-12


def test_pre_deuce_values_at_half():
    assert pre_deuce_state_dist(0.5) == pytest.approx({2: 3 / 16, 1: 1 / 8, 0: 3 / 8, -1: 1 / 8, -2: 3 / 16})


def test_deuce_values():
    p = 0.6
    d0 = p * p / (p * p + (1 - p) ** 2)
    assert deuce_win_prob(p, 0) == pytest.approx(d0)
    assert deuce_win_prob(p, 1) == pytest.approx(p + (1 - p) * d0)
    assert deuce_win_prob(p, -1) == pytest.approx(p * d0)
    with pytest.raises(DomainError):
        deuce_win_prob(p, 2)


@pytest.mark.parametrize("bad", [0, 1, 0.0, 1.0, -0.1, 1.5, math.nan, math.inf, True, "0.5", None])
def test_check_prob_rejects(bad):
    with pytest.raises(DomainError):
        check_prob(bad)


def test_point_probs():
    pp = PointProbs(0.7, 0.6)
    assert pp.swapped() == PointProbs(0.6, 0.7)
    assert PointProbs.equal(0.6) == PointProbs(0.6, 0.6)
    with pytest.raises(DomainError):
        PointProbs(0.7, 1.0)
    with pytest.raises(Exception):
        pp.p = 0.1


def test_solver_residual_guard():
    # a singular chain (a state that only loops to itself) cannot be solved
    with pytest.raises((ConvergenceError, np.linalg.LinAlgError)):
        solve_absorbing({"x": [("x", 1.0)]}, {})
