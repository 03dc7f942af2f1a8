"""Match scores as ordered set sequences, and the Grand Tiebreak discrepancy.

A match needs a Grand Tiebreak (GT) when its winner, by sets, won strictly
fewer games in total than the loser.  Sets are treated as independent and
each is scored with A serving its first game.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Optional, Tuple, Union

import numpy as np

from .prob_core import DomainError, PointProbs, check_prob
from .set_model import SET_SCORES, SetScore, SetScoreDist, set_score_dist


class InvalidSequenceError(ValueError):
    """A set sequence is not a finished match."""


@dataclass(frozen=True)
class MatchFormat:
    best_of: int

    def __post_init__(self) -> None:
        if self.best_of not in (3, 5) or isinstance(self.best_of, bool):
            raise DomainError(f"best_of must be 3 or 5, got {self.best_of!r}")

    @property
    def k(self) -> int:
        return self.best_of // 2

    @property
    def sets_to_win(self) -> int:
        return self.k + 1


BEST_OF_3 = MatchFormat(3)
BEST_OF_5 = MatchFormat(5)

ScoreLike = Union[SetScore, Tuple[int, int]]


def _as_score(s: ScoreLike) -> SetScore:
    return s if isinstance(s, SetScore) else SetScore(*s)


@dataclass(frozen=True)
class SetSequence:
    """The ordered set scores of one finished match, from A's side."""

    sets: Tuple[SetScore, ...]
    fmt: Optional[MatchFormat] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        try:
            sets = tuple(_as_score(s) for s in self.sets)
        except (DomainError, TypeError) as exc:
            raise InvalidSequenceError(str(exc)) from None
        object.__setattr__(self, "sets", sets)
        if not sets:
            raise InvalidSequenceError("empty set sequence")
        won_a = sum(s.a_wins for s in sets)
        won_b = len(sets) - won_a
        need = max(won_a, won_b)
        if self.fmt is not None and need != self.fmt.sets_to_win:
            raise InvalidSequenceError(
                f"winner has {need} sets, best-of-{self.fmt.best_of} needs {self.fmt.sets_to_win}"
            )
        if need not in (2, 3) or min(won_a, won_b) >= need:
            raise InvalidSequenceError(f"set sequence {self} does not finish a best-of-3 or best-of-5 match")
        if sets[-1].a_wins != (won_a > won_b):
            raise InvalidSequenceError(f"set sequence {self} continues after the match was decided")
        if self.fmt is None:
            object.__setattr__(self, "fmt", MatchFormat(2 * need - 1))

    @property
    def winner(self) -> str:
        return "A" if self.sets[-1].a_wins else "B"

    @property
    def games(self) -> Tuple[int, int]:
        return sum(s.games_a for s in self.sets), sum(s.games_b for s in self.sets)

    def __len__(self) -> int:
        return len(self.sets)

    def __str__(self) -> str:
        return "[" + ", ".join(f"({s.games_a}, {s.games_b})" for s in self.sets) + "]"


def _raw_sequences(fmt: MatchFormat) -> Iterator[Tuple[int, ...]]:
    """Yield sequences as tuples of indices into ``SET_SCORES``."""
    a_idx = [i for i, s in enumerate(SET_SCORES) if s.a_wins]
    b_idx = [i for i, s in enumerate(SET_SCORES) if not s.a_wins]
    need = fmt.sets_to_win

    def rec(prefix: Tuple[int, ...], wa: int, wb: int) -> Iterator[Tuple[int, ...]]:
        for idx, da, db in ((a_idx, 1, 0), (b_idx, 0, 1)):
            na, nb = wa + da, wb + db
            for i in idx:
                seq = prefix + (i,)
                if na == need or nb == need:
                    yield seq
                else:
                    yield from rec(seq, na, nb)

    yield from rec((), 0, 0)


def enumerate_sequences(fmt: MatchFormat) -> Iterator[SetSequence]:
    """Every terminal set sequence of the format, each exactly once."""
    for raw in _raw_sequences(fmt):
        yield SetSequence(tuple(SET_SCORES[i] for i in raw), fmt)


def is_gt(seq: SetSequence) -> bool:
    """True iff the match winner won strictly fewer games than the loser."""
    if not isinstance(seq, SetSequence):
        seq = SetSequence(tuple(seq))
    ga, gb = seq.games
    return ga < gb if seq.winner == "A" else gb < ga


@dataclass(frozen=True)
class GtCensus:
    best_of: int
    counts: Dict[int, int]
    gt_counts: Dict[int, int]

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def gt(self) -> int:
        return sum(self.gt_counts.values())

    @property
    def share(self) -> float:
        return self.gt / self.total


def gt_census(fmt: MatchFormat) -> GtCensus:
    counts: Counter = Counter()
    gts: Counter = Counter()
    for seq in enumerate_sequences(fmt):
        counts[len(seq)] += 1
        if is_gt(seq):
            gts[len(seq)] += 1
    lengths = range(fmt.sets_to_win, fmt.best_of + 1)
    return GtCensus(fmt.best_of, {n: counts[n] for n in lengths}, {n: gts[n] for n in lengths})


def sequence_probability(seq: SetSequence, probs: PointProbs, dist: Optional[SetScoreDist] = None) -> float:
    """Product of the independent set-score probabilities."""
    if not isinstance(seq, SetSequence):
        seq = SetSequence(tuple(seq))
    if dist is None:
        dist = set_score_dist(probs)
    out = 1.0
    for s in seq.sets:
        out *= dist[s]
    return out


@lru_cache(maxsize=None)
def _grouped(fmt: MatchFormat, which: str) -> Tuple[np.ndarray, np.ndarray]:
    """Sequences grouped by the multiset of their set scores.

    Returns ``(exponents, multiplicity)``: row ``i`` of ``exponents`` counts
    how often each of the 14 set scores occurs and ``multiplicity[i]`` how
    many ordered sequences share that multiset.  ``which`` selects the GT
    sequences ("gt") or the sequences A wins ("a_wins").
    """
    groups: Counter = Counter()
    for raw in _raw_sequences(fmt):
        ga = sum(SET_SCORES[i].games_a for i in raw)
        gb = sum(SET_SCORES[i].games_b for i in raw)
        a_won = SET_SCORES[raw[-1]].a_wins
        if which == "gt":
            keep = ga < gb if a_won else gb < ga
        else:
            keep = a_won
        if keep:
            groups[tuple(sorted(raw))] += 1
    exps = np.zeros((len(groups), len(SET_SCORES)), dtype=np.int64)
    mult = np.zeros(len(groups), dtype=np.float64)
    for row, (key, n) in enumerate(groups.items()):
        for i in key:
            exps[row, i] += 1
        mult[row] = n
    exps.setflags(write=False)
    mult.setflags(write=False)
    return exps, mult


def _weighted_sum(fmt: MatchFormat, which: str, dist: SetScoreDist) -> float:
    exps, mult = _grouped(fmt, which)
    d = np.array([dist[s] for s in SET_SCORES])
    # a sum of ~10^5 nonnegative terms can overshoot 1 by a few ulps
    return min(1.0, float(np.sum(mult * np.prod(d ** exps, axis=1))))


def gt_probability(probs: PointProbs, fmt: MatchFormat) -> float:
    """Probability that the finished match needs a Grand Tiebreak."""
    return _weighted_sum(fmt, "gt", set_score_dist(probs))


def match_win_prob(probs: PointProbs, fmt: MatchFormat) -> float:
    """Probability that A wins the match."""
    return _weighted_sum(fmt, "a_wins", set_score_dist(probs))


def match_outcome_probs_oracle(dist: SetScoreDist, fmt: MatchFormat) -> Dict[str, float]:
    """Match-win and GT probabilities by DP over (sets won, game difference).

    Independent of the sequence enumeration; used to cross-check it.
    """
    need = fmt.sets_to_win
    layer: Dict[Tuple[int, int, int], float] = {(0, 0, 0): 1.0}
    a_win = gt = total = 0.0
    while layer:
        nxt: Dict[Tuple[int, int, int], float] = {}
        for (wa, wb, diff), w in layer.items():
            for s in SET_SCORES:
                key = (wa + s.a_wins, wb + (not s.a_wins), diff + s.games_a - s.games_b)
                pr = w * dist[s]
                if key[0] == need or key[1] == need:
                    total += pr
                    if key[0] == need:
                        a_win += pr
                        gt += pr if key[2] < 0 else 0.0
                    else:
                        gt += pr if key[2] > 0 else 0.0
                else:
                    nxt[key] = nxt.get(key, 0.0) + pr
        layer = nxt
    return {"a_win": a_win, "gt": gt, "total": total}


@dataclass(frozen=True)
class GtScan:
    best_of: int
    points: List[Tuple[float, float]]

    @property
    def argmax(self) -> Tuple[float, float]:
        return max(self.points, key=lambda t: t[1])


def probability_grid(step: float) -> List[float]:
    """Interior grid ``step, 2*step, ...`` strictly inside (0, 1)."""
    if not 0.0 < step < 0.5:
        raise DomainError(f"grid step must lie in (0, 0.5), got {step!r}")
    n = int(round(1.0 / step))
    pts = [round(i * step, 12) for i in range(1, n + 1)]
    return [p for p in pts if 0.0 < p < 1.0]


def gt_probability_scan(fmt: MatchFormat, grid: Iterable[float]) -> GtScan:
    """GT probability with p = q at each grid point."""
    pts = [(check_prob(p), gt_probability(PointProbs(p, p), fmt)) for p in grid]
    return GtScan(fmt.best_of, pts)
