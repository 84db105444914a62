"""Decoding bit vectors into line-ups, feasibility checks and line-up diffs."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path
from typing import Iterable, Sequence

from .constraints import Comparator, LinearConstraint
from .roster import (
    Position,
    RatingTable,
    VariableIndex,
    _parse_hundredths,
    hundredths_to_decimal,
)


@dataclass(frozen=True)
class Pick:
    variable: int
    player: str
    position: Position
    hundredths: int

    @property
    def rating(self) -> Decimal:
        return hundredths_to_decimal(self.hundredths)

    def __str__(self) -> str:
        return f"{self.player} {self.position}"


@dataclass(frozen=True)
class LineupSolution:
    """Selected picks, sorted by variable id. Totals are exact."""

    picks: tuple[Pick, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "picks", tuple(sorted(self.picks, key=lambda p: p.variable)))

    @property
    def total_rating(self) -> Decimal:
        return hundredths_to_decimal(sum(p.hundredths for p in self.picks))

    @property
    def variables(self) -> tuple[int, ...]:
        return tuple(p.variable for p in self.picks)

    def repeated_players(self) -> list[str]:
        seen, repeated = set(), []
        for p in self.picks:
            if p.player in seen and p.player not in repeated:
                repeated.append(p.player)
            seen.add(p.player)
        return repeated

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["variable", "player", "position", "rating"])
        for p in self.picks:
            writer.writerow([p.variable, p.player, p.position.name, f"{p.rating:.2f}"])
        return buf.getvalue()


def parse_lineup(source: str) -> LineupSolution:
    """Read a ``variable,player,position,rating`` line-up CSV."""
    reader = csv.reader(io.StringIO(source))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["variable", "player", "position", "rating"]:
        raise ValueError("line-up header must be 'variable,player,position,rating'")
    picks = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 4:
            raise ValueError(f"row {lineno}: expected 4 fields, got {len(row)}")
        var, player, position, rating = (cell.strip() for cell in row)
        try:
            picks.append(Pick(int(var), player, Position.parse(position), _parse_hundredths(rating)))
        except ValueError as exc:
            raise ValueError(f"row {lineno}: {exc}") from None
    return LineupSolution(tuple(picks))


def load_lineup(path: str | Path) -> LineupSolution:
    return parse_lineup(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class ConstraintCheck:
    label: str
    satisfied: bool
    lhs: int
    rhs: int
    comparator: Comparator

    def __str__(self) -> str:
        mark = "ok" if self.satisfied else "VIOLATED"
        return f"{self.label}: {self.lhs} {self.comparator.value} {self.rhs} [{mark}]"


@dataclass(frozen=True)
class FeasibilityReport:
    checks: tuple[ConstraintCheck, ...]

    @property
    def overall(self) -> bool:
        return all(c.satisfied for c in self.checks)

    def violated(self) -> list[ConstraintCheck]:
        return [c for c in self.checks if not c.satisfied]


def check_feasibility(bits: Sequence[int], equalities: Iterable[LinearConstraint],
                      inequalities: Iterable[LinearConstraint] = ()) -> FeasibilityReport:
    """Evaluate the original constraints on the decision bits.

    Bits beyond the highest constrained id (slack variables) are never read.
    """
    checks = []
    for c in [*equalities, *inequalities]:
        checks.append(ConstraintCheck(c.label, c.satisfied(bits), c.lhs(bits), c.rhs, c.comparator))
    return FeasibilityReport(tuple(checks))


def decode_lineup(bits: Sequence[int], index: VariableIndex, table: RatingTable) -> LineupSolution:
    for i in range(index.n, len(bits)):
        if bits[i]:
            raise ValueError(
                f"bit {i + 1} is set but lies outside the {index.n} decision variables; "
                "strip slack bits first")
    picks = []
    for var in range(1, min(len(bits), index.n) + 1):
        if bits[var - 1]:
            player, position = index.pair(var)
            picks.append(Pick(var, player, position, table.get(player, position).hundredths))
    return LineupSolution(tuple(picks))


def lineup_from_ids(ids: Iterable[int], index: VariableIndex, table: RatingTable) -> LineupSolution:
    picks = []
    for var in ids:
        player, position = index.pair(var)
        picks.append(Pick(var, player, position, table.get(player, position).hundredths))
    return LineupSolution(tuple(picks))


@dataclass(frozen=True)
class LineupDiff:
    only_in_found: tuple[Pick, ...]
    only_in_reference: tuple[Pick, ...]
    delta: Decimal

    @property
    def identical(self) -> bool:
        return not self.only_in_found and not self.only_in_reference and self.delta == 0

    def render(self) -> str:
        if self.identical:
            return "line-ups identical (delta 0.00)"
        lines = []
        for p in self.only_in_found:
            lines.append(f"+ x_{p.variable} {p.player} {p.position} {p.rating:.2f}")
        for p in self.only_in_reference:
            lines.append(f"- x_{p.variable} {p.player} {p.position} {p.rating:.2f}")
        lines.append(f"delta {self.delta:+.2f}")
        return "\n".join(lines)


def compare(found: LineupSolution, reference: LineupSolution) -> LineupDiff:
    """Picks are matched on (player, position); the delta is found minus reference."""
    ref_keys = {(p.player, p.position) for p in reference.picks}
    found_keys = {(p.player, p.position) for p in found.picks}
    return LineupDiff(
        only_in_found=tuple(p for p in found.picks if (p.player, p.position) not in ref_keys),
        only_in_reference=tuple(p for p in reference.picks
                                if (p.player, p.position) not in found_keys),
        delta=found.total_rating - reference.total_rating,
    )
