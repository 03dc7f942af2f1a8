"""Set-score distribution from game-win probabilities and the tiebreak.

By default A serves the first game of the set (``first="B"`` flips this)
and service alternates by game, so the first server also opens any
tiebreak at 6-6 as the server of game 13.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from math import comb
from typing import Dict, Iterator, Mapping, Tuple, Union

from .prob_core import DomainError, PointProbs, check_prob, game_win_prob, game_win_prob_oracle
from .tiebreak import check_first, tiebreak_win_prob, tiebreak_win_prob_oracle


@dataclass(frozen=True, order=True)
class SetScore:
    """A terminal set score, games for A then games for B."""

    games_a: int
    games_b: int

    def __post_init__(self) -> None:
        if not is_terminal_set_score(self.games_a, self.games_b):
            raise DomainError(f"({self.games_a}, {self.games_b}) is not a terminal set score")

    @property
    def a_wins(self) -> bool:
        return self.games_a > self.games_b

    def reversed(self) -> "SetScore":
        return SetScore(self.games_b, self.games_a)

    def __str__(self) -> str:
        return f"{self.games_a}-{self.games_b}"


def is_terminal_set_score(a: int, b: int) -> bool:
    if isinstance(a, bool) or isinstance(b, bool) or not isinstance(a, int) or not isinstance(b, int):
        return False
    hi, lo = max(a, b), min(a, b)
    if lo < 0:
        return False
    return (hi == 6 and lo <= 4) or (hi == 7 and lo in (5, 6))


A_SET_WINS: Tuple[SetScore, ...] = tuple(SetScore(6, x) for x in range(5)) + (SetScore(7, 5), SetScore(7, 6))
B_SET_WINS: Tuple[SetScore, ...] = tuple(s.reversed() for s in A_SET_WINS)
SET_SCORES: Tuple[SetScore, ...] = A_SET_WINS + B_SET_WINS

ScoreKey = Union[SetScore, Tuple[int, int]]


@dataclass(frozen=True)
class GameProbs:
    """Game-win probabilities: ``p_bar`` for A's service games, ``q_bar`` for B's."""

    p_bar: float
    q_bar: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "p_bar", check_prob(self.p_bar, "p_bar"))
        object.__setattr__(self, "q_bar", check_prob(self.q_bar, "q_bar"))

    @classmethod
    def from_points(cls, probs: PointProbs) -> "GameProbs":
        return cls(game_win_prob(probs.p), game_win_prob(probs.q))


class SetScoreDist(Mapping[SetScore, float]):
    """Probability of each of the 14 terminal set scores.

    ``reach_tiebreak`` keeps the probability of 6-6 that the two tiebreak
    entries split.
    """

    def __init__(self, probs: Mapping[SetScore, float], reach_tiebreak: float):
        self._probs = {s: float(probs[s]) for s in SET_SCORES}
        self.reach_tiebreak = float(reach_tiebreak)

    def __getitem__(self, key: ScoreKey) -> float:
        if not isinstance(key, SetScore):
            key = SetScore(*key)
        return self._probs[key]

    def __iter__(self) -> Iterator[SetScore]:
        return iter(SET_SCORES)

    def __len__(self) -> int:
        return len(SET_SCORES)

    def total(self) -> float:
        return sum(self._probs.values())

    def a_win(self) -> float:
        return sum(self._probs[s] for s in A_SET_WINS)

    def reversed(self) -> "SetScoreDist":
        return SetScoreDist({s.reversed(): v for s, v in self._probs.items()}, self.reach_tiebreak)

    def max_deviation(self, other: "SetScoreDist") -> float:
        return max(abs(self[s] - other[s]) for s in SET_SCORES)

    def as_dict(self) -> Dict[str, float]:
        return {str(s): self._probs[s] for s in SET_SCORES}

    def __repr__(self) -> str:
        return f"SetScoreDist({self.as_dict()!r})"


def direct_score_probs(games: GameProbs) -> Dict[SetScore, float]:
    """Closed forms for the 12 set scores reached without a tiebreak."""
    p, q = games.p_bar, games.q_bar
    P, Q = 1 - p, 1 - q
    out: Dict[SetScore, float] = {}
    for x in range(5):
        m, odd = divmod(x, 2)
        if not odd:
            a = sum(
                comb(2 + m, y - 1) * comb(3 + m, 6 - y) * p ** (6 - y) * P ** (y - 3 + m) * q ** (3 + m - y) * Q**y
                for y in range(3 - m, 4 + m)
            )
            b = sum(
                comb(3 + m, y) * comb(2 + m, 5 - y) * p ** (3 + m - y) * P**y * q ** (6 - y) * Q ** (y - 3 + m)
                for y in range(3 - m, 4 + m)
            )
        else:
            a = sum(
                comb(3 + m, y) * comb(3 + m, 5 - y) * p ** (6 - y) * P ** (y - 2 + m) * q ** (3 + m - y) * Q**y
                for y in range(2 - m, 4 + m)
            )
            b = sum(
                comb(3 + m, y - 1) * comb(3 + m, 6 - y) * p ** (4 + m - y) * P**y * q ** (6 - y) * Q ** (y - 3 + m)
                for y in range(3 - m, 5 + m)
            )
        out[SetScore(6, x)] = a
        out[SetScore(x, 6)] = b
    out[SetScore(7, 5)] = sum(
        comb(5, y) * comb(5, 5 - y) * p ** (6 - y) * P**y * q ** (5 - y) * Q ** (y + 1) for y in range(6)
    )
    out[SetScore(5, 7)] = sum(
        comb(5, y) * comb(5, 5 - y) * p ** (5 - y) * P ** (y + 1) * q ** (6 - y) * Q**y for y in range(6)
    )
    return out


def set_score_dist(probs: PointProbs, first: str = "A") -> SetScoreDist:
    """Distribution over the 14 terminal set scores.

    ``first`` serves game 1 and, by strict alternation, opens the tiebreak.
    """
    if check_first(first) == "B":
        return set_score_dist(probs.swapped()).reversed()
    direct = direct_score_probs(GameProbs.from_points(probs))
    # by complement; clamp the rounding residue when 6-6 is all but impossible
    tied = max(0.0, 1.0 - sum(direct.values()))
    tb = tiebreak_win_prob(probs)
    direct[SetScore(7, 6)] = tied * tb
    direct[SetScore(6, 7)] = tied * (1.0 - tb)
    return SetScoreDist(direct, tied)


def set_win_prob(probs: PointProbs, first: str = "A") -> float:
    return set_score_dist(probs, first).a_win()


def set_dist_oracle(probs: PointProbs, first: str = "A") -> SetScoreDist:
    """Set-score distribution by forward DP over game scores.

    Uses the chain-solve game oracle and the enumeration tiebreak oracle, so
    none of the closed forms enter.
    """
    check_first(first)
    p_bar = game_win_prob_oracle(probs.p)
    q_bar = game_win_prob_oracle(probs.q)
    out: Dict[SetScore, float] = defaultdict(float)
    tied = 0.0
    layer = {(0, 0): 1.0}
    while layer:
        nxt: Dict[Tuple[int, int], float] = defaultdict(float)
        for (a, b), w in layer.items():
            a_serves = ((a + b) % 2 == 0) == (first == "A")
            p_a = p_bar if a_serves else 1.0 - q_bar
            for (na, nb), pr in (((a + 1, b), p_a), ((a, b + 1), 1.0 - p_a)):
                if is_terminal_set_score(na, nb):
                    out[SetScore(na, nb)] += w * pr
                elif (na, nb) == (6, 6):
                    tied += w * pr
                else:
                    nxt[(na, nb)] += w * pr
        layer = nxt
    tb = tiebreak_win_prob_oracle(probs, first)
    out[SetScore(7, 6)] = tied * tb
    out[SetScore(6, 7)] = tied * (1.0 - tb)
    return SetScoreDist(out, tied)
