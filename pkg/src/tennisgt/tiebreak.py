"""The 7-point set tiebreak.

Service order is A/BB/AA/BB/... from the first point.  A tiebreak that
reaches 6-6 continues until one player leads by two points; that phase is
the sudden-death subchain below.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Callable, Dict, List, Tuple

from .prob_core import DomainError, PointProbs, solve_absorbing

Score = Tuple[int, int]

A_WINS: Tuple[Score, ...] = tuple((7, x) for x in range(6))
B_WINS: Tuple[Score, ...] = tuple((x, 7) for x in range(6))
DECISIVE: Tuple[Score, ...] = A_WINS + B_WINS


def point_server(k: int, first: str = "A") -> str:
    """Server of tiebreak point ``k`` (0-based) under the ABBA rule."""
    other = "B" if first == "A" else "A"
    return first if ((k + 1) // 2) % 2 == 0 else other


def check_first(first: str) -> str:
    if first not in ("A", "B"):
        raise DomainError(f"first server must be 'A' or 'B', got {first!r}")
    return first


@dataclass(frozen=True)
class TiebreakDist:
    """Probabilities of the 12 decisive tiebreak scores plus reaching 6-6."""

    scores: Dict[Score, float]
    tied: float

    def __getitem__(self, score: Score) -> float:
        if tuple(score) == (6, 6):
            return self.tied
        return self.scores[tuple(score)]

    def total(self) -> float:
        return sum(self.scores.values()) + self.tied

    def a_direct(self) -> float:
        return sum(self.scores[s] for s in A_WINS)

    def b_direct(self) -> float:
        return sum(self.scores[s] for s in B_WINS)

    def reversed(self) -> "TiebreakDist":
        """Scores seen from B's side."""
        return TiebreakDist({(b, a): v for (a, b), v in self.scores.items()}, self.tied)

    def max_deviation(self, other: "TiebreakDist") -> float:
        devs = [abs(self.scores[s] - other.scores[s]) for s in DECISIVE]
        return max(devs + [abs(self.tied - other.tied)])


# One summand family per decisive score: (y range, term(y, p, q)).
# y counts the points the winner takes on his/her own serve.
_Term = Callable[[int, float, float], float]


def _table() -> Dict[Score, Tuple[range, _Term]]:
    C = comb
    return {
        (7, 0): (range(3, 4), lambda y, p, q: p**3 * (1 - q) ** 4),
        (0, 7): (range(4, 5), lambda y, p, q: (1 - p) ** 3 * q**4),
        (7, 1): (range(3, 5), lambda y, p, q: C(3, y - 1) * C(4, 7 - y) * p**y * (1 - p) ** (4 - y) * q ** (y - 3) * (1 - q) ** (7 - y)),
        (1, 7): (range(3, 5), lambda y, p, q: C(4, y) * C(3, 6 - y) * p ** (y - 3) * (1 - p) ** (7 - y) * q**y * (1 - q) ** (4 - y)),
        (7, 2): (range(3, 6), lambda y, p, q: C(4, y - 1) * C(4, 7 - y) * p**y * (1 - p) ** (5 - y) * q ** (y - 3) * (1 - q) ** (7 - y)),
        (2, 7): (range(2, 5), lambda y, p, q: C(4, y) * C(4, 6 - y) * p ** (y - 2) * (1 - p) ** (7 - y) * q**y * (1 - q) ** (4 - y)),
        (7, 3): (range(2, 6), lambda y, p, q: C(5, y) * C(4, 6 - y) * p**y * (1 - p) ** (5 - y) * q ** (y - 2) * (1 - q) ** (7 - y)),
        (3, 7): (range(2, 6), lambda y, p, q: C(4, y - 1) * C(5, 7 - y) * p ** (y - 2) * (1 - p) ** (7 - y) * q**y * (1 - q) ** (5 - y)),
        (7, 4): (range(1, 6), lambda y, p, q: C(5, y) * C(5, 6 - y) * p**y * (1 - p) ** (5 - y) * q ** (y - 1) * (1 - q) ** (7 - y)),
        (4, 7): (range(2, 7), lambda y, p, q: C(5, y - 1) * C(5, 7 - y) * p ** (y - 2) * (1 - p) ** (7 - y) * q**y * (1 - q) ** (6 - y)),
        (7, 5): (range(1, 7), lambda y, p, q: C(5, y - 1) * C(6, 7 - y) * p**y * (1 - p) ** (6 - y) * q ** (y - 1) * (1 - q) ** (7 - y)),
        (5, 7): (range(1, 7), lambda y, p, q: C(6, y) * C(5, 6 - y) * p ** (y - 1) * (1 - p) ** (7 - y) * q**y * (1 - q) ** (6 - y)),
    }


TABLE = _table()


def tied_prob(p: float, q: float) -> float:
    """Probability the tiebreak reaches 6-6 (A serving first)."""
    return sum(
        comb(6, y) * comb(6, 6 - y) * p ** (6 - y) * (1 - p) ** y * q ** (6 - y) * (1 - q) ** y
        for y in range(7)
    )


def table_terms(probs: PointProbs) -> Dict[Tuple[Score, int], float]:
    """Every summand of the closed forms keyed by ``(score, y)``."""
    p, q = probs.p, probs.q
    return {(s, y): term(y, p, q) for s, (ys, term) in TABLE.items() for y in ys}


def tiebreak_score_dist(probs: PointProbs, first: str = "A") -> TiebreakDist:
    """Closed-form tiebreak score distribution."""
    if check_first(first) == "B":
        return tiebreak_score_dist(probs.swapped()).reversed()
    p, q = probs.p, probs.q
    scores = {s: sum(term(y, p, q) for y in ys) for s, (ys, term) in TABLE.items()}
    return TiebreakDist(scores, tied_prob(p, q))


def sudden_death_win_prob(probs: PointProbs) -> float:
    """Probability A wins the tiebreak from 6-6.

    The same value holds whoever serves first, provided the 1, 2, 2, ...
    service pattern continues.
    """
    p, q = probs.p, probs.q
    return (p - p * q) / (p + q - 2 * p * q)


def sudden_death_oracle(probs: PointProbs, first: str = "A") -> float:
    """Sudden-death win probability from the 8-state subchain by linear solve."""
    check_first(first)
    p, q = probs.p, probs.q
    # probability that A takes the next point when X serves
    win = {"A": p, "B": 1 - q}
    other = {"A": "B", "B": "A"}
    transitions = {}
    for srv in ("A", "B"):
        # at r = 0 the server serves once and hands over; at r = +-1 the
        # current server serves the second of a pair and keeps the serve next
        transitions[(srv, 0)] = [((other[srv], 1), win[srv]), ((other[srv], -1), 1 - win[srv])]
        transitions[(srv, 1)] = [("WA", win[srv]), ((srv, 0), 1 - win[srv])]
        transitions[(srv, -1)] = [((srv, 0), win[srv]), ("WB", 1 - win[srv])]
    values = solve_absorbing(transitions, {"WA": 1.0, "WB": 0.0})
    return values[(first, 0)]


def tiebreak_win_prob(probs: PointProbs, first: str = "A") -> float:
    """Probability A wins the tiebreak."""
    d = tiebreak_score_dist(probs, first)
    return d.a_direct() + d.tied * sudden_death_win_prob(probs)


def tiebreak_win_prob_b(probs: PointProbs, first: str = "A") -> float:
    """Probability B wins the tiebreak, computed from B's side of the formulas."""
    p, q = probs.p, probs.q
    d = tiebreak_score_dist(probs, first)
    return d.b_direct() + d.tied * (q - p * q) / (p + q - 2 * p * q)


@lru_cache(maxsize=None)
def _terminal_prefixes(first: str) -> Tuple[Tuple[Score, int, int, int, int], ...]:
    """Distinct point-outcome prefixes that end the regulation phase.

    Each entry is ``(score, a_serve_won, a_serve_lost, b_serve_won,
    b_serve_lost)`` where "won"/"lost" are from the server's side.
    """
    seen = set()
    out = []
    for bits in itertools.product((1, 0), repeat=12):
        a = b = 0
        counts = [0, 0, 0, 0]
        prefix: List[int] = []
        for k, a_won in enumerate(bits):
            prefix.append(a_won)
            if point_server(k, first) == "A":
                counts[0 if a_won else 1] += 1
            else:
                counts[3 if a_won else 2] += 1
            a += a_won
            b += 1 - a_won
            if a == 7 or b == 7 or (a == 6 and b == 6):
                break
        key = tuple(prefix)
        if key in seen:
            continue
        seen.add(key)
        out.append(((a, b), *counts))
    return tuple(out)


def _prefix_prob(probs: PointProbs, aw: int, al: int, bw: int, bl: int) -> float:
    p, q = probs.p, probs.q
    return p**aw * (1 - p) ** al * q**bw * (1 - q) ** bl


def tiebreak_dist_oracle(probs: PointProbs, first: str = "A") -> TiebreakDist:
    """Tiebreak score distribution by exhaustive enumeration of point sequences."""
    prefixes = _terminal_prefixes(check_first(first))
    scores = {s: 0.0 for s in DECISIVE}
    tied = 0.0
    for score, aw, al, bw, bl in prefixes:
        pr = _prefix_prob(probs, aw, al, bw, bl)
        if score == (6, 6):
            tied += pr
        else:
            scores[score] += pr
    return TiebreakDist(scores, tied)


def oracle_by_own_serve_points(probs: PointProbs) -> Dict[Tuple[Score, int], float]:
    """Enumeration split by the winner's points won on own serve (A first)."""
    out: Dict[Tuple[Score, int], float] = {}
    for score, aw, al, bw, bl in _terminal_prefixes("A"):
        if score == (6, 6):
            continue
        y = aw if score[0] == 7 else bw
        out[(score, y)] = out.get((score, y), 0.0) + _prefix_prob(probs, aw, al, bw, bl)
    return out


def tiebreak_win_prob_oracle(probs: PointProbs, first: str = "A") -> float:
    """Tiebreak win probability from the enumeration and subchain oracles only."""
    d = tiebreak_dist_oracle(probs, first)
    return d.a_direct() + d.tied * sudden_death_oracle(probs, first)
