"""Exact tennis scoring probabilities and the Grand Tiebreak discrepancy."""

from .match_model import (
    BEST_OF_3,
    BEST_OF_5,
    MatchFormat,
    SetSequence,
    enumerate_sequences,
    gt_census,
    gt_probability,
    gt_probability_scan,
    is_gt,
    match_win_prob,
    sequence_probability,
)
from .prob_core import DomainError, PointProbs, deuce_win_prob, game_win_prob, pre_deuce_state_dist
from .set_model import SetScore, set_score_dist, set_win_prob
from .tiebreak import sudden_death_win_prob, tiebreak_score_dist, tiebreak_win_prob

__version__ = "0.1.0"
