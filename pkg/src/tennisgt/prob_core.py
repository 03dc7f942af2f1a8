"""Point-to-game Markov chain.

A service game is won by the first player to reach 4 points with a margin
of 2.  Everything here is a pure function of the server's point-win
probability ``p``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Hashable, Mapping, Sequence, Tuple

import numpy as np

# relative score -> probability; keys are 2, 1, 0, -1, -2
GameStateDist = Dict[int, float]

RELATIVE_SCORES = (2, 1, 0, -1, -2)


class DomainError(ValueError):
    """A probability or state argument lies outside its valid domain."""


class ConvergenceError(ArithmeticError):
    """A linear solve left a residual above the accepted bound."""


def check_prob(x: float, name: str = "p") -> float:
    """Return ``x`` as float if it lies in the open interval (0, 1)."""
    if isinstance(x, bool) or not isinstance(x, (int, float, np.floating, np.integer)):
        raise DomainError(f"{name} must be a real number, got {x!r}")
    x = float(x)
    if not 0.0 < x < 1.0:
        raise DomainError(f"{name} must lie in the open interval (0, 1), got {x!r}")
    return x


@dataclass(frozen=True)
class PointProbs:
    """Per-point serve-win probabilities: ``p`` for A serving, ``q`` for B serving."""

    p: float
    q: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", check_prob(self.p, "p"))
        object.__setattr__(self, "q", check_prob(self.q, "q"))

    def swapped(self) -> "PointProbs":
        """The same contest with the players relabeled."""
        return PointProbs(self.q, self.p)

    @classmethod
    def equal(cls, p: float) -> "PointProbs":
        return cls(p, p)


def game_win_prob(p: float) -> float:
    """Probability that the server wins a game from 0-0."""
    p = check_prob(p)
    return p**4 * (15 - 34 * p + 28 * p**2 - 8 * p**3) / (1 - 2 * p + 2 * p**2)


def pre_deuce_state_dist(p: float) -> GameStateDist:
    """Distribution over the five top-row states of the game chain.

    ``r = 2`` / ``r = -2`` are direct wins for server / receiver; ``r = 0`` is
    30-30 (equivalent to deuce), ``r = 1`` is 40-30 reached from 40-15 and
    ``r = -1`` is 30-40 reached from 15-40.
    """
    p = check_prob(p)
    s = 1 - p
    return {
        2: p**4 * (5 - 4 * p),
        1: 4 * p**3 * s**2,
        0: 6 * p**2 * s**2,
        -1: 4 * p**2 * s**3,
        -2: s**4 * (1 + 4 * p),
    }


def deuce_win_prob(p: float, r: int) -> float:
    """Probability the server eventually wins from relative score ``r`` in the deuce loop."""
    p = check_prob(p)
    if isinstance(r, bool) or r not in (1, 0, -1):
        raise DomainError(f"relative score must be one of 1, 0, -1, got {r!r}")
    den = 1 - 2 * p + 2 * p**2
    if r == 1:
        return (p - p**2 + p**3) / den
    if r == 0:
        return p**2 / den
    return p**3 / den


def solve_absorbing(
    transitions: Mapping[Hashable, Sequence[Tuple[Hashable, float]]],
    wins: Mapping[Hashable, float],
    residual_tol: float = 1e-14,
) -> Dict[Hashable, float]:
    """Absorption values of a finite Markov chain by a direct linear solve.

    ``transitions`` maps every transient state to ``(next_state, prob)``
    pairs; next states missing from ``transitions`` must appear in ``wins``,
    which gives the payoff (1 for a win, 0 for a loss) of absorbing states.
    Returns the expected payoff from every transient state.
    """
    states = list(transitions)
    index = {s: i for i, s in enumerate(states)}
    n = len(states)
    a = np.eye(n)
    b = np.zeros(n)
    for s, moves in transitions.items():
        i = index[s]
        for t, w in moves:
            if t in index:
                a[i, index[t]] -= w
            else:
                b[i] += w * wins[t]
    x = np.linalg.solve(a, b)
    residual = float(np.max(np.abs(a @ x - b))) if n else 0.0
    if residual > residual_tol:
        raise ConvergenceError(f"absorbing-chain residual {residual:.3e} exceeds {residual_tol:.0e}")
    return {s: float(x[index[s]]) for s in states}


def _game_chain(p: float):
    # states are (server points, receiver points) with 3-3 standing for deuce
    # and "adv"/"dis" for advantage server / receiver
    transitions = {}
    for i in range(4):
        for j in range(4):
            if (i, j) == (3, 3):
                continue
            win = "W" if i == 3 and j <= 2 else (i + 1, j)
            lose = "L" if j == 3 and i <= 2 else (i, j + 1)
            transitions[(i, j)] = [(win, p), (lose, 1 - p)]
    transitions[(3, 3)] = [("adv", p), ("dis", 1 - p)]
    transitions["adv"] = [("W", p), ((3, 3), 1 - p)]
    transitions["dis"] = [((3, 3), p), ("L", 1 - p)]
    return transitions


def game_win_prob_oracle(p: float) -> float:
    """Server's game-win probability by solving the full point-score chain.

    Independent of the closed form; used to cross-check it.
    """
    p = check_prob(p)
    values = solve_absorbing(_game_chain(p), {"W": 1.0, "L": 0.0})
    return values[(0, 0)]
