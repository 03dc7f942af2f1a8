"""Historical match records in the Sackmann CSV layout.

Score strings are written from the match winner's side, one token per set
(``"7-6(5)"``: winner 7 games, loser 6, loser took 5 tiebreak points).
Tokens such as ``RET`` or ``W/O`` mark matches that were not completed.
"""

from __future__ import annotations

import csv
import glob
import os
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple

INCOMPLETE_TOKENS = frozenset({"RET", "RET.", "W/O", "WO", "DEF", "DEF.", "ABN", "ABD", "UNFINISHED", "WALKOVER"})
INCOMPLETE_PHRASES = ("played and unfinished", "played and abandoned", "in progress")
REQUIRED_COLUMNS = ("tourney_level", "round", "score")

EARLY_ROUNDS = frozenset({"R128", "R64", "R32"})
LATE_ROUNDS = frozenset({"QF", "SF", "F"})

_SET_RE = re.compile(r"^(\d{1,3})-(\d{1,3})(?:\((\d{1,3})\))?$")


class ScoreParseError(ValueError):
    """A score token that is neither a set score nor a completion marker."""

    def __init__(self, message: str, token: str = "", position: int = -1):
        super().__init__(message)
        self.token = token
        self.position = position


class DatasetError(ValueError):
    """A CSV file that cannot be read as match records."""


class ParsedSet(NamedTuple):
    winner_games: int
    loser_games: int
    tiebreak: Optional[int] = None

    def render(self) -> str:
        tb = f"({self.tiebreak})" if self.tiebreak is not None else ""
        return f"{self.winner_games}-{self.loser_games}{tb}"


def parse_score(score_raw: str) -> Tuple[List[ParsedSet], bool]:
    """Split a score string into sets and a completion flag.

    Raises ScoreParseError (with the offending token and its position) for
    anything it cannot read; never anything else.
    """
    if not isinstance(score_raw, str):
        raise ScoreParseError(f"score must be text, got {type(score_raw).__name__}")
    text = score_raw.strip()
    if not text:
        raise ScoreParseError("empty score", "", 0)
    completed = True
    lowered = text.lower()
    for phrase in INCOMPLETE_PHRASES:
        if phrase in lowered:
            completed = False
            start = lowered.index(phrase)
            text = (text[:start] + text[start + len(phrase):]).strip()
            lowered = text.lower()
    sets: List[ParsedSet] = []
    for pos, token in enumerate(text.split()):
        if token.upper() in INCOMPLETE_TOKENS:
            completed = False
            continue
        m = _SET_RE.match(token)
        if not m:
            raise ScoreParseError(f"malformed score token {token!r} at position {pos}", token, pos)
        w, l, tb = m.groups()
        sets.append(ParsedSet(int(w), int(l), int(tb) if tb is not None else None))
    return sets, completed


def render_score(sets: Sequence[ParsedSet]) -> str:
    return " ".join(s.render() for s in sets)


@dataclass(frozen=True)
class MatchRecord:
    tour: str
    level: str
    round: str
    score_raw: str
    parsed_sets: Tuple[ParsedSet, ...] = ()
    completed: bool = False
    date: Optional[int] = None
    parse_error: Optional[str] = None

    @classmethod
    def from_row(cls, row: dict, tour: str) -> "MatchRecord":
        score = row.get("score") or ""
        date = row.get("tourney_date") or ""
        try:
            sets, completed = parse_score(score)
            err = None
        except ScoreParseError as exc:
            sets, completed, err = [], False, str(exc)
        return cls(
            tour=tour,
            level=(row.get("tourney_level") or "").strip(),
            round=(row.get("round") or "").strip(),
            score_raw=score,
            parsed_sets=tuple(sets),
            completed=completed and bool(sets),
            date=int(date) if date.strip().isdigit() else None,
            parse_error=err,
        )

    @property
    def games(self) -> Tuple[int, int]:
        """Total games of (winner, loser)."""
        return sum(s.winner_games for s in self.parsed_sets), sum(s.loser_games for s in self.parsed_sets)

    @property
    def is_empirical_gt(self) -> bool:
        w, l = self.games
        return self.completed and w < l

    @property
    def straight_sets(self) -> bool:
        return all(s.winner_games > s.loser_games for s in self.parsed_sets)


def read_records(path: str, tour: str) -> Iterator[MatchRecord]:
    """Stream the records of one CSV file."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            missing = [c for c in REQUIRED_COLUMNS if c not in (reader.fieldnames or [])]
            if missing:
                raise DatasetError(f"{path}: missing required column(s) {', '.join(missing)}")
            for row in reader:
                yield MatchRecord.from_row(row, tour)
    except OSError as exc:
        raise DatasetError(f"{path}: {exc.strerror or exc}") from exc
    except (UnicodeDecodeError, csv.Error) as exc:
        raise DatasetError(f"{path}: {exc}") from exc


def sackmann_files(root: str, tour: str) -> List[str]:
    """Yearly tour-level match files (``atp_matches_YYYY.csv``) under ``root``."""
    prefix = {"m": "atp", "w": "wta"}[tour]
    pattern = os.path.join(root, "**", f"{prefix}_matches_[0-9][0-9][0-9][0-9].csv")
    return sorted(glob.glob(pattern, recursive=True))


def read_path(path: str, tour: str) -> Iterator[MatchRecord]:
    """Records from a CSV file, or from every yearly file of a Sackmann checkout."""
    if os.path.isdir(path):
        files = sackmann_files(path, tour)
        if not files:
            raise DatasetError(f"{path}: no {tour!r} match files found")
        for f in files:
            yield from read_records(f, tour)
    else:
        yield from read_records(path, tour)


Predicate = Callable[[MatchRecord], bool]


def grand_slam(rec: MatchRecord) -> bool:
    return rec.level == "G"


def date_between(start: Optional[int] = None, end: Optional[int] = None) -> Predicate:
    """Inclusive filter on ``tourney_date`` (YYYYMMDD)."""

    def pred(rec: MatchRecord) -> bool:
        if rec.date is None:
            return start is None and end is None
        return (start is None or rec.date >= start) and (end is None or rec.date <= end)

    return pred


def all_of(*preds: Predicate) -> Predicate:
    return lambda rec: all(p(rec) for p in preds)


@dataclass(frozen=True)
class GtStats:
    matches: int = 0
    empirical_gts: int = 0
    excluded_incomplete: int = 0
    parse_errors: int = 0

    @property
    def empirical_gt_pct(self) -> Optional[float]:
        return 100.0 * self.empirical_gts / self.matches if self.matches else None

    def __add__(self, other: "GtStats") -> "GtStats":
        return GtStats(
            self.matches + other.matches,
            self.empirical_gts + other.empirical_gts,
            self.excluded_incomplete + other.excluded_incomplete,
            self.parse_errors + other.parse_errors,
        )


def empirical_gt_stats(records: Iterable[MatchRecord], predicate: Predicate = grand_slam) -> GtStats:
    """Count completed matches and those the winner took with fewer games."""
    matches = gts = incomplete = errors = 0
    for rec in records:
        if not predicate(rec):
            continue
        if rec.parse_error is not None:
            errors += 1
        elif not rec.completed:
            incomplete += 1
        else:
            matches += 1
            gts += rec.is_empirical_gt
    return GtStats(matches, gts, incomplete, errors)


def straight_set_rates(
    records: Iterable[MatchRecord],
    early: Iterable[str] = EARLY_ROUNDS,
    late: Iterable[str] = LATE_ROUNDS,
    predicate: Predicate = grand_slam,
) -> Tuple[Optional[float], Optional[float]]:
    """Percentage of completed matches won in straight sets, per round group.

    A group with no matches yields ``None``.
    """
    early, late = frozenset(early), frozenset(late)
    tally = {"early": [0, 0], "late": [0, 0]}
    for rec in records:
        if not predicate(rec) or not rec.completed:
            continue
        group = "early" if rec.round in early else "late" if rec.round in late else None
        if group is None:
            continue
        tally[group][0] += 1
        tally[group][1] += rec.straight_sets
    pct = lambda n, k: 100.0 * k / n if n else None  # noqa: E731
    return pct(*tally["early"]), pct(*tally["late"])
