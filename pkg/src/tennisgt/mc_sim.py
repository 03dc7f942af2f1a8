"""Point-by-point Monte Carlo simulation of matches and Grand Tiebreaks.

Matches are simulated in fixed-size blocks of trials with numpy.  Block
``b`` draws from its own stream derived from ``(seed, b)``, so results do
not depend on how many workers run the blocks or in what order.

Service runs on continuously across sets by default: the receiver of the
last game of a set serves the next set, and after a tiebreak the player who
did not open it serves first.  ``serve_mode="reset"`` makes A open every
set instead, which is the convention of the exact model.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from .match_model import MatchFormat, SetSequence
from .prob_core import DomainError, PointProbs
from .set_model import SET_SCORES, SetScore

SERVE_MODES = ("continuous", "reset")
DEFAULT_BLOCK = 1 << 16
_SCORE_INDEX = {(s.games_a, s.games_b): i for i, s in enumerate(SET_SCORES)}


@dataclass(frozen=True)
class SimConfig:
    probs: PointProbs
    fmt: MatchFormat
    trials: int
    seed: int
    serve_mode: str = "continuous"
    play_gt: bool = False
    gt_first: str = "A"
    block_size: int = DEFAULT_BLOCK

    def __post_init__(self) -> None:
        if isinstance(self.trials, bool) or not isinstance(self.trials, int) or self.trials < 1:
            raise DomainError(f"trials must be a positive integer, got {self.trials!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be an integer in [0, 2**64), got {self.seed!r}")
        if self.serve_mode not in SERVE_MODES:
            raise DomainError(f"serve_mode must be one of {SERVE_MODES}, got {self.serve_mode!r}")
        if self.gt_first not in ("A", "B"):
            raise DomainError(f"gt_first must be 'A' or 'B', got {self.gt_first!r}")
        if self.block_size < 1:
            raise DomainError("block_size must be positive")

    @property
    def n_blocks(self) -> int:
        return -(-self.trials // self.block_size)

    def block_trials(self, b: int) -> int:
        return min(self.block_size, self.trials - b * self.block_size)


@dataclass(frozen=True)
class MatchOutcome:
    set_scores: SetSequence
    winner: str
    games_won: Tuple[int, int]
    gt_flag: bool
    gt_winner: Optional[str] = None


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(block,)))


def simulate_tiebreaks(probs: PointProbs, n: int, rng: np.random.Generator, first: str = "A") -> np.ndarray:
    """Play ``n`` independent 7-point tiebreaks; True where A wins."""
    if first not in ("A", "B"):
        raise DomainError(f"first server must be 'A' or 'B', got {first!r}")
    first_srv = 0 if first == "A" else 1
    out = np.zeros(n, dtype=bool)
    idx = np.arange(n)
    pa = np.zeros(n, dtype=np.int64)
    pb = np.zeros(n, dtype=np.int64)
    while idx.size:
        k = pa + pb
        srv = np.where(((k + 1) // 2) % 2 == 0, first_srv, 1 - first_srv)
        win_a = rng.random(idx.size) < np.where(srv == 0, probs.p, 1.0 - probs.q)
        pa += win_a
        pb += ~win_a
        a_done = (pa >= 7) & (pa - pb >= 2)
        done = a_done | ((pb >= 7) & (pb - pa >= 2))
        if done.any():
            out[idx[done]] = a_done[done]
            keep = ~done
            idx, pa, pb = idx[keep], pa[keep], pb[keep]
    return out


@dataclass
class BlockResult:
    """Raw per-trial arrays of one simulated block plus service tallies."""

    set_games: np.ndarray  # (n, best_of, 2), -1 where no set was played
    n_sets: np.ndarray
    a_won: np.ndarray
    games: np.ndarray  # (n, 2)
    gt: np.ndarray
    gt_a_won: np.ndarray  # meaningful only where gt and GT play was requested
    served: np.ndarray  # service games started by [A, B]
    held: np.ndarray  # service games held by [A, B]
    tiebreaks: int
    tiebreak_a: int


def simulate_block(
    probs: PointProbs,
    fmt: MatchFormat,
    n: int,
    rng: np.random.Generator,
    serve_mode: str = "continuous",
    play_gt: bool = False,
    gt_first: str = "A",
) -> BlockResult:
    """Simulate ``n`` matches point by point, all in lockstep."""
    if serve_mode not in SERVE_MODES:
        raise DomainError(f"serve_mode must be one of {SERVE_MODES}, got {serve_mode!r}")
    need = fmt.sets_to_win
    set_games = np.full((n, fmt.best_of, 2), -1, dtype=np.int64)
    n_sets_out = np.zeros(n, dtype=np.int64)
    games_out = np.zeros((n, 2), dtype=np.int64)
    a_won_out = np.zeros(n, dtype=bool)
    served = np.zeros(2, dtype=np.int64)
    held = np.zeros(2, dtype=np.int64)
    tiebreaks = tiebreak_a = 0

    idx = np.arange(n)
    z = lambda: np.zeros(n, dtype=np.int64)  # noqa: E731
    pa, pb, ga, gb, sa, sb, srv, nset, tot_a, tot_b = (z() for _ in range(10))
    in_tb = np.zeros(n, dtype=bool)
    p, q = probs.p, probs.q

    while idx.size:
        k = pa + pb
        point_srv = np.where(in_tb & (((k + 1) // 2) % 2 == 1), 1 - srv, srv)
        win_a = rng.random(idx.size) < np.where(point_srv == 0, p, 1.0 - q)
        pa += win_a
        pb += ~win_a
        target = np.where(in_tb, 7, 4)
        game_a = (pa >= target) & (pa - pb >= 2)
        game_b = (pb >= target) & (pb - pa >= 2)
        game_end = game_a | game_b
        if not game_end.any():
            continue

        plain = game_end & ~in_tb
        a_srv = srv == 0
        served[0] += np.count_nonzero(plain & a_srv)
        served[1] += np.count_nonzero(plain & ~a_srv)
        held[0] += np.count_nonzero(plain & a_srv & game_a)
        held[1] += np.count_nonzero(plain & ~a_srv & game_b)
        tb_end = game_end & in_tb
        tiebreaks += int(np.count_nonzero(tb_end))
        tiebreak_a += int(np.count_nonzero(tb_end & game_a))

        ga += game_a
        gb += game_b
        pa[game_end] = 0
        pb[game_end] = 0
        srv[game_end] = 1 - srv[game_end]

        set_end = game_end & (in_tb | ((ga >= 6) & (ga - gb >= 2)) | ((gb >= 6) & (gb - ga >= 2)))
        if set_end.any():
            rows = idx[set_end]
            set_games[rows, nset[set_end], 0] = ga[set_end]
            set_games[rows, nset[set_end], 1] = gb[set_end]
            a_set = set_end & (ga > gb)
            sa += a_set
            sb += set_end & ~a_set
            tot_a += np.where(set_end, ga, 0)
            tot_b += np.where(set_end, gb, 0)
            nset += set_end
            ga[set_end] = 0
            gb[set_end] = 0
            in_tb[set_end] = False
            if serve_mode == "reset":
                srv[set_end] = 0
        in_tb |= game_end & (ga == 6) & (gb == 6)

        done = (sa == need) | (sb == need)
        if done.any():
            rows = idx[done]
            n_sets_out[rows] = nset[done]
            games_out[rows, 0] = tot_a[done]
            games_out[rows, 1] = tot_b[done]
            a_won_out[rows] = sa[done] == need
            keep = ~done
            idx = idx[keep]
            pa, pb, ga, gb, sa, sb, srv, nset, tot_a, tot_b, in_tb = (
                arr[keep] for arr in (pa, pb, ga, gb, sa, sb, srv, nset, tot_a, tot_b, in_tb)
            )

    gt = np.where(a_won_out, games_out[:, 0] < games_out[:, 1], games_out[:, 1] < games_out[:, 0])
    gt_a_won = np.zeros(n, dtype=bool)
    if play_gt and gt.any():
        gt_a_won[gt] = simulate_tiebreaks(probs, int(np.count_nonzero(gt)), rng, gt_first)
    return BlockResult(set_games, n_sets_out, a_won_out, games_out, gt, gt_a_won, served, held, tiebreaks, tiebreak_a)


def _outcomes(res: BlockResult, fmt: MatchFormat, play_gt: bool) -> Iterator[MatchOutcome]:
    for i in range(res.a_won.size):
        sets = tuple(SetScore(int(a), int(b)) for a, b in res.set_games[i, : res.n_sets[i]])
        gt = bool(res.gt[i])
        gt_winner = ("A" if res.gt_a_won[i] else "B") if (gt and play_gt) else None
        yield MatchOutcome(
            SetSequence(sets, fmt),
            "A" if res.a_won[i] else "B",
            (int(res.games[i, 0]), int(res.games[i, 1])),
            gt,
            gt_winner,
        )


def simulate_match(
    probs: PointProbs,
    fmt: MatchFormat,
    rng: np.random.Generator,
    serve_mode: str = "continuous",
    play_gt: bool = False,
    gt_first: str = "A",
) -> MatchOutcome:
    res = simulate_block(probs, fmt, 1, rng, serve_mode, play_gt, gt_first)
    return next(_outcomes(res, fmt, play_gt))


def simulate_grand_tiebreak(probs: PointProbs, rng: np.random.Generator, first: str = "A") -> str:
    return "A" if simulate_tiebreaks(probs, 1, rng, first)[0] else "B"


def _run_block(config: SimConfig, b: int) -> BlockResult:
    return simulate_block(
        config.probs,
        config.fmt,
        config.block_trials(b),
        block_rng(config.seed, b),
        config.serve_mode,
        config.play_gt,
        config.gt_first,
    )


def iter_outcomes(config: SimConfig) -> Iterator[MatchOutcome]:
    """The full per-trial transcript, in trial order."""
    for b in range(config.n_blocks):
        yield from _outcomes(_run_block(config, b), config.fmt, config.play_gt)


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float
    n: int
    degenerate: bool = False

    @classmethod
    def from_counts(cls, hits: int, n: int) -> "Estimate":
        if n < 1:
            return cls(math.nan, math.nan, 0, True)
        phat = hits / n
        se = math.sqrt(phat * (1.0 - phat) / n)
        return cls(phat, se, n, n < 2 or se == 0.0)

    def z_score(self, exact: float) -> float:
        if self.stderr == 0.0:
            return 0.0 if self.value == exact else math.inf
        return (self.value - exact) / self.stderr


@dataclass
class SimSummary:
    """Aggregated counts of a simulation run; merging is plain addition."""

    trials: int = 0
    a_wins: int = 0
    gts: int = 0
    gt_plays: int = 0
    gt_a_wins: int = 0
    first_set: Dict[SetScore, int] = field(default_factory=lambda: {s: 0 for s in SET_SCORES})
    all_sets: Dict[SetScore, int] = field(default_factory=lambda: {s: 0 for s in SET_SCORES})
    sets_played: int = 0
    served: Tuple[int, int] = (0, 0)
    held: Tuple[int, int] = (0, 0)
    tiebreaks: int = 0
    tiebreak_a: int = 0

    def add_block(self, res: BlockResult, play_gt: bool) -> None:
        n = int(res.a_won.size)
        self.trials += n
        self.a_wins += int(np.count_nonzero(res.a_won))
        self.gts += int(np.count_nonzero(res.gt))
        if play_gt:
            self.gt_plays += int(np.count_nonzero(res.gt))
            self.gt_a_wins += int(np.count_nonzero(res.gt & res.gt_a_won))
        codes = np.full(res.set_games.shape[:2], -1, dtype=np.int64)
        played = res.set_games[:, :, 0] >= 0
        for (a, b), i in _SCORE_INDEX.items():
            codes[played & (res.set_games[:, :, 0] == a) & (res.set_games[:, :, 1] == b)] = i
        first = np.bincount(codes[:, 0], minlength=len(SET_SCORES))
        every = np.bincount(codes[played], minlength=len(SET_SCORES))
        for i, s in enumerate(SET_SCORES):
            self.first_set[s] += int(first[i])
            self.all_sets[s] += int(every[i])
        self.sets_played += int(np.count_nonzero(played))
        self.served = (self.served[0] + int(res.served[0]), self.served[1] + int(res.served[1]))
        self.held = (self.held[0] + int(res.held[0]), self.held[1] + int(res.held[1]))
        self.tiebreaks += res.tiebreaks
        self.tiebreak_a += res.tiebreak_a

    def match_win(self) -> Estimate:
        return Estimate.from_counts(self.a_wins, self.trials)

    def gt_prob(self) -> Estimate:
        return Estimate.from_counts(self.gts, self.trials)

    def gt_play_win(self) -> Estimate:
        return Estimate.from_counts(self.gt_a_wins, self.gt_plays)

    def first_set_prob(self, score: SetScore) -> Estimate:
        return Estimate.from_counts(self.first_set[score], self.trials)

    def hold_prob(self, player: str) -> Estimate:
        i = 0 if player == "A" else 1
        return Estimate.from_counts(self.held[i], self.served[i])

    def tiebreak_win(self) -> Estimate:
        return Estimate.from_counts(self.tiebreak_a, self.tiebreaks)


def simulate(config: SimConfig, workers: int = 1) -> SimSummary:
    """Run every block of ``config`` and aggregate the counts."""
    summary = SimSummary()
    blocks = range(config.n_blocks)
    if workers > 1 and config.n_blocks > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results: List[BlockResult] = list(pool.map(_run_block, [config] * len(blocks), blocks))
        for res in results:
            summary.add_block(res, config.play_gt)
    else:
        for b in blocks:
            summary.add_block(_run_block(config, b), config.play_gt)
    return summary


def estimate_gt_prob(config: SimConfig, workers: int = 1) -> Estimate:
    """Sample frequency of the GT discrepancy with its binomial standard error."""
    return simulate(config, workers).gt_prob()
