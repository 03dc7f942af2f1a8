"""Command-line front end: ``tennisgt <command> [flags]``.

Reports go to stdout as JSON (or an aligned table with ``--format table``);
errors go to stderr as a JSON object and the exit status is nonzero.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import secrets
import sys
from decimal import ROUND_HALF_UP, Decimal
from typing import Any, Callable, Dict, List, Optional, Sequence

from . import dataset, match_model, mc_sim, prob_core, set_model, tiebreak, verify
from .prob_core import DomainError, PointProbs

DATA_ENV = "TENNISGT_DATA"

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def pct2(x: Optional[float]) -> Optional[float]:
    """Percentage of a probability, rounded half-up to 2 decimals."""
    if x is None:
        return None
    return float(Decimal(repr(100.0 * x)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def round2(x: Optional[float]) -> Optional[float]:
    """A value already in percent, rounded half-up to 2 decimals."""
    if x is None:
        return None
    return float(Decimal(repr(x)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would print and exit(2)
        raise UsageError(message)


def _probs(args) -> PointProbs:
    return PointProbs(args.p, args.q)


def _finite(x: float) -> Optional[float]:
    return x if math.isfinite(x) else None


def _estimate(e: mc_sim.Estimate, exact: Optional[float] = None) -> dict:
    out = {"estimate": _finite(e.value), "stderr": _finite(e.stderr), "n": e.n, "degenerate": e.degenerate}
    if exact is not None:
        out["exact"] = exact
        out["z"] = _finite(e.z_score(exact)) if e.n else None
    return out


def cmd_game_prob(args) -> dict:
    p = prob_core.check_prob(args.p, "p")
    return {
        "command": "game-prob",
        "p": p,
        "game_win_prob": prob_core.game_win_prob(p),
        "oracle": prob_core.game_win_prob_oracle(p),
        "pre_deuce": {str(r): v for r, v in prob_core.pre_deuce_state_dist(p).items()},
        "deuce_win_prob": {str(r): prob_core.deuce_win_prob(p, r) for r in (1, 0, -1)},
    }


def cmd_tiebreak_dist(args) -> dict:
    pp = _probs(args)
    d = tiebreak.tiebreak_score_dist(pp, args.first)
    return {
        "command": "tiebreak-dist",
        "p": pp.p,
        "q": pp.q,
        "first_server": args.first,
        "scores": {f"{a}-{b}": v for (a, b), v in d.scores.items()},
        "tied": d.tied,
        "sudden_death_win_prob": tiebreak.sudden_death_win_prob(pp),
        "tiebreak_win_prob": tiebreak.tiebreak_win_prob(pp, args.first),
        "total": d.total(),
    }


def cmd_set_dist(args) -> dict:
    pp = _probs(args)
    d = set_model.set_score_dist(pp, args.first)
    games = set_model.GameProbs.from_points(pp)
    return {
        "command": "set-dist",
        "p": pp.p,
        "q": pp.q,
        "first_server": args.first,
        "game_probs": {"p_bar": games.p_bar, "q_bar": games.q_bar},
        "scores": d.as_dict(),
        "reach_tiebreak": d.reach_tiebreak,
        "set_win_prob": d.a_win(),
        "total": d.total(),
    }


def cmd_gt_census(args) -> dict:
    c = match_model.gt_census(match_model.MatchFormat(args.best_of))
    return {
        "command": "gt-census",
        "best_of": c.best_of,
        "counts": {str(k): v for k, v in c.counts.items()},
        "gt_counts": {str(k): v for k, v in c.gt_counts.items()},
        "total": c.total,
        "gt": c.gt,
        "share": c.share,
        "share_pct": pct2(c.share),
    }


def cmd_gt_prob(args) -> dict:
    pp = _probs(args)
    fmt = match_model.MatchFormat(args.best_of)
    gt = match_model.gt_probability(pp, fmt)
    return {
        "command": "gt-prob",
        "p": pp.p,
        "q": pp.q,
        "best_of": fmt.best_of,
        "gt_probability": gt,
        "gt_pct": pct2(gt),
        "match_win_prob": match_model.match_win_prob(pp, fmt),
    }


def cmd_gt_scan(args) -> dict:
    fmt = match_model.MatchFormat(args.best_of)
    scan = match_model.gt_probability_scan(fmt, match_model.probability_grid(args.step))
    best_p, best_v = scan.argmax
    return {
        "command": "gt-scan",
        "best_of": fmt.best_of,
        "step": args.step,
        "points": [{"p": p, "gt_probability": v, "gt_pct": pct2(v)} for p, v in scan.points],
        "argmax": {"p": best_p, "gt_probability": best_v, "gt_pct": pct2(best_v)},
    }


def cmd_simulate(args) -> dict:
    pp = _probs(args)
    fmt = match_model.MatchFormat(args.best_of)
    seed = args.seed if args.seed is not None else secrets.randbits(63)
    config = mc_sim.SimConfig(
        pp,
        fmt,
        args.trials,
        seed,
        serve_mode=args.serve_mode,
        play_gt=args.play_gt,
        gt_first=args.gt_first,
    )
    s = mc_sim.simulate(config, workers=args.workers)
    dist = set_model.set_score_dist(pp)
    out = {
        "command": "simulate",
        "p": pp.p,
        "q": pp.q,
        "best_of": fmt.best_of,
        "trials": args.trials,
        "seed": seed,
        "seed_supplied": args.seed is not None,
        "serve_mode": args.serve_mode,
        "exact_convention": "independent sets, A serves first in every set",
        "match_win": _estimate(s.match_win(), match_model.match_win_prob(pp, fmt)),
        "gt": _estimate(s.gt_prob(), match_model.gt_probability(pp, fmt)),
        "game_win": {
            "A": _estimate(s.hold_prob("A"), prob_core.game_win_prob(pp.p)),
            "B": _estimate(s.hold_prob("B"), prob_core.game_win_prob(pp.q)),
        },
        "tiebreak_win": _estimate(s.tiebreak_win(), tiebreak.tiebreak_win_prob(pp)),
        "first_set": {str(sc): _estimate(s.first_set_prob(sc), dist[sc]) for sc in set_model.SET_SCORES},
    }
    if args.play_gt:
        out["grand_tiebreak"] = {"first_server": args.gt_first, **_estimate(s.gt_play_win())}
    return out


def cmd_analyze(args) -> dict:
    path = args.input or os.environ.get(DATA_ENV)
    if not path:
        raise UsageError(f"analyze needs --input or the {DATA_ENV} environment variable")
    pred = dataset.all_of(dataset.grand_slam, dataset.date_between(args.start, args.end))
    records = list(dataset.read_path(path, args.tour))
    stats = dataset.empirical_gt_stats(records, pred)
    early, late = dataset.straight_set_rates(records, predicate=pred)
    return {
        "command": "analyze",
        "input": path,
        "tour": args.tour,
        "matches": stats.matches,
        "empirical_gts": stats.empirical_gts,
        "empirical_gt_pct": round2(stats.empirical_gt_pct),
        "excluded_incomplete": stats.excluded_incomplete,
        "parse_errors": stats.parse_errors,
        "straight_sets": {"early_pct": round2(early), "late_pct": round2(late)},
    }


def cmd_verify(args) -> dict:
    report = verify.run_checks()
    return {"command": "verify", **report.as_dict()}


COMMANDS: Dict[str, Callable[[Any], dict]] = {
    "game-prob": cmd_game_prob,
    "tiebreak-dist": cmd_tiebreak_dist,
    "set-dist": cmd_set_dist,
    "gt-census": cmd_gt_census,
    "gt-prob": cmd_gt_prob,
    "gt-scan": cmd_gt_scan,
    "simulate": cmd_simulate,
    "analyze": cmd_analyze,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tennisgt", description="Exact tennis scoring probabilities and the Grand Tiebreak.")
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "table"), default="json")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, help_: str, **flags: bool) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help_, parents=[common])
        if flags.get("p"):
            sp.add_argument("--p", type=float, required=True, help="A's point-win probability on serve")
        if flags.get("q"):
            sp.add_argument("--q", type=float, required=True, help="B's point-win probability on serve")
        if flags.get("first"):
            sp.add_argument("--first", choices=("A", "B"), default="A", help="player serving first")
        if flags.get("best_of"):
            sp.add_argument("--best-of", type=int, choices=(3, 5), required=True)
        return sp

    add("game-prob", "game-win probability of a server", p=True)
    add("tiebreak-dist", "distribution of tiebreak scores", p=True, q=True, first=True)
    add("set-dist", "distribution of set scores", p=True, q=True, first=True)
    add("gt-census", "count match scores needing a Grand Tiebreak", best_of=True)
    add("gt-prob", "probability a match needs a Grand Tiebreak", p=True, q=True, best_of=True)
    scan = add("gt-scan", "GT probability over a grid of p = q", best_of=True)
    scan.add_argument("--step", type=float, default=0.01)
    sim = add("simulate", "Monte Carlo simulation of matches", p=True, q=True, best_of=True)
    sim.add_argument("--trials", type=int, required=True)
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--serve-mode", choices=mc_sim.SERVE_MODES, default="continuous")
    sim.add_argument("--play-gt", action="store_true", help="play a Grand Tiebreak when one is needed")
    sim.add_argument("--gt-first", choices=("A", "B"), default="A")
    sim.add_argument("--workers", type=int, default=1)
    an = add("analyze", "empirical GT statistics of historical matches")
    an.add_argument("--input", default=None, help=f"CSV file or Sackmann checkout (default ${DATA_ENV})")
    an.add_argument("--tour", choices=("m", "w"), required=True)
    an.add_argument("--start", type=int, default=None, help="first tourney_date, YYYYMMDD")
    an.add_argument("--end", type=int, default=None, help="last tourney_date, YYYYMMDD")
    add("verify", "cross-check every closed form against its oracle")
    return parser


def _flatten(obj: Any, prefix: str = "") -> List[tuple]:
    if isinstance(obj, dict):
        rows = []
        for k, v in obj.items():
            rows.extend(_flatten(v, f"{prefix}.{k}" if prefix else str(k)))
        return rows
    if isinstance(obj, list) and obj and isinstance(obj[0], dict):
        rows = []
        for i, v in enumerate(obj):
            rows.extend(_flatten(v, f"{prefix}[{i}]"))
        return rows
    return [(prefix, obj)]


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2)
    rows = _flatten(report)
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k:<{width}}  {json.dumps(v) if not isinstance(v, str) else v}" for k, v in rows)


def _fail(kind: str, message: str, status: int) -> int:
    print(json.dumps({"error": {"type": kind, "message": message}}), file=sys.stderr)
    return status


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        report = COMMANDS[args.command](args)
    except UsageError as exc:
        return _fail("usage", str(exc), EXIT_USAGE)
    except DomainError as exc:
        return _fail("domain", str(exc), EXIT_FAILURE)
    except dataset.DatasetError as exc:
        return _fail("io", str(exc), EXIT_FAILURE)
    print(render(report, args.format))
    if args.command == "verify" and not report["passed"]:
        return EXIT_FAILURE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
