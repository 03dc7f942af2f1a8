"""Cross-checks of every closed form against its independent oracle.

The oracles (chain solves, exhaustive enumeration, forward DP) are the
reference.  A closed form that strays beyond tolerance anywhere on the grid
is listed as divergent; it is reported, never patched.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from . import match_model, prob_core, set_model, tiebreak
from .prob_core import PointProbs

DEFAULT_GRID: Tuple[float, ...] = tuple(round(0.1 * i, 10) for i in range(1, 10))
GAME_GRID: Tuple[float, ...] = tuple(round(0.01 * i, 10) for i in range(1, 100))
FORMULA_TOL = 1e-10
IDENTITY_TOL = 1e-12

Override = Callable[[PointProbs], float]


@dataclass
class Check:
    name: str
    kind: str  # "formula" (closed form vs oracle) or "identity"
    tol: float
    max_dev: float = 0.0
    worst_at: Optional[Tuple[float, float]] = None

    @property
    def passed(self) -> bool:
        return self.max_dev <= self.tol

    def update(self, dev: float, at: Tuple[float, float]) -> None:
        if dev > self.max_dev or self.worst_at is None:
            self.max_dev = max(dev, self.max_dev)
            self.worst_at = at

    def as_dict(self) -> dict:
        d = asdict(self)
        d["worst_at"] = list(self.worst_at) if self.worst_at else None
        d["passed"] = self.passed
        return d


@dataclass
class Report:
    checks: List[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def divergent_formulas(self) -> List[str]:
        return [c.name for c in self.checks if c.kind == "formula" and not c.passed]

    @property
    def failed_identities(self) -> List[str]:
        return [c.name for c in self.checks if c.kind == "identity" and not c.passed]

    def get(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "divergent_formulas": self.divergent_formulas,
            "failed_identities": self.failed_identities,
            "checks": [c.as_dict() for c in self.checks],
        }


def _label(score: Tuple[int, int], bar: bool = False) -> str:
    return f"{'Pbar' if bar else 'P'}({score[0]},{score[1]})"


def run_checks(
    grid: Sequence[float] = DEFAULT_GRID,
    game_grid: Sequence[float] = GAME_GRID,
    overrides: Optional[Mapping[str, Override]] = None,
    formula_tol: float = FORMULA_TOL,
    identity_tol: float = IDENTITY_TOL,
    include_match: bool = True,
) -> Report:
    """Evaluate every check on ``grid`` x ``grid`` (and ``game_grid`` for games).

    ``overrides`` swaps the closed form of one named entry for another
    callable, which is how a suspect transcription can be audited.
    """
    overrides = dict(overrides or {})
    checks: Dict[str, Check] = {}

    def check(name: str, kind: str) -> Check:
        if name not in checks:
            checks[name] = Check(name, kind, formula_tol if kind == "formula" else identity_tol)
        return checks[name]

    def closed(name: str, default: float, probs: PointProbs) -> float:
        return overrides[name](probs) if name in overrides else default

    for p in game_grid:
        at = (p, p)
        pp = PointProbs(p, p)
        g = closed("game_win_prob", prob_core.game_win_prob(p), pp)
        check("game_win_prob", "formula").update(abs(g - prob_core.game_win_prob_oracle(p)), at)
        dist = prob_core.pre_deuce_state_dist(p)
        recomposed = dist[2] + sum(dist[r] * prob_core.deuce_win_prob(p, r) for r in (1, 0, -1))
        check("pre_deuce_recomposition", "identity").update(abs(recomposed - prob_core.game_win_prob(p)), at)
        check("pre_deuce_sum", "identity").update(abs(sum(dist.values()) - 1.0), at)
        check("game_relabel", "identity").update(
            abs(prob_core.game_win_prob(p) + prob_core.game_win_prob(1 - p) - 1.0), at
        )

    for p in grid:
        for q in grid:
            at = (p, q)
            pp = PointProbs(p, q)

            tb = tiebreak.tiebreak_score_dist(pp)
            tb_or = tiebreak.tiebreak_dist_oracle(pp)
            for s in tiebreak.DECISIVE + ((6, 6),):
                name = _label(s)
                check(name, "formula").update(abs(closed(name, tb[s], pp) - tb_or[s]), at)
            sd = closed("sudden_death", tiebreak.sudden_death_win_prob(pp), pp)
            check("sudden_death", "formula").update(abs(sd - tiebreak.sudden_death_oracle(pp)), at)
            check("sudden_death_first_B", "identity").update(abs(sd - tiebreak.sudden_death_oracle(pp, "B")), at)
            tbw = tiebreak.tiebreak_win_prob(pp)
            check("tiebreak_win_prob", "formula").update(abs(tbw - tiebreak.tiebreak_win_prob_oracle(pp)), at)
            check("tiebreak_sum", "identity").update(abs(tb.total() - 1.0), at)
            check("tiebreak_oracle_sum", "identity").update(abs(tb_or.total() - 1.0), at)
            check("tiebreak_complement", "identity").update(abs(tbw + tiebreak.tiebreak_win_prob_b(pp) - 1.0), at)
            check("tiebreak_relabel", "identity").update(
                tb.reversed().max_deviation(tiebreak.tiebreak_dist_oracle(pp.swapped(), "B")), at
            )

            sdist = set_model.set_score_dist(pp)
            s_or = set_model.set_dist_oracle(pp)
            for s in set_model.SET_SCORES:
                name = _label((s.games_a, s.games_b), bar=True)
                check(name, "formula").update(abs(closed(name, sdist[s], pp) - s_or[s]), at)
            check("set_sum", "identity").update(abs(sdist.total() - 1.0), at)
            check("set_oracle_sum", "identity").update(abs(s_or.total() - 1.0), at)
            check("set_relabel", "identity").update(
                sdist.reversed().max_deviation(set_model.set_dist_oracle(pp.swapped(), "B")), at
            )
            check("set_win_first_server", "identity").update(
                abs(set_model.set_win_prob(pp) - set_model.set_win_prob(pp, "B")), at
            )

            if include_match:
                for fmt in (match_model.BEST_OF_3, match_model.BEST_OF_5):
                    ref = match_model.match_outcome_probs_oracle(s_or, fmt)
                    tag = f"bo{fmt.best_of}"
                    check(f"gt_probability_{tag}", "formula").update(
                        abs(match_model.gt_probability(pp, fmt) - ref["gt"]), at
                    )
                    check(f"match_win_prob_{tag}", "formula").update(
                        abs(match_model.match_win_prob(pp, fmt) - ref["a_win"]), at
                    )
    return Report(list(checks.values()))
