"""Player ratings and the binary-variable indexing built on top of them."""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field
from decimal import Decimal
from enum import IntEnum
from importlib import resources
from pathlib import Path
from typing import Iterator, Sequence


class RosterError(ValueError):
    """Raised when a roster CSV cannot be turned into a rating table."""


class Position(IntEnum):
    """Position codes, in the fixed column order of the rating table."""

    GK = 0
    DC = 1
    DL = 2
    DR = 3
    DM = 4
    CM = 5
    AM = 6
    FWL = 7
    FWR = 8
    FW = 9

    def __str__(self) -> str:
        return self.name

    @classmethod
    def parse(cls, token: str) -> "Position":
        try:
            return cls[token.strip()]
        except KeyError:
            raise ValueError(f"unknown position code {token.strip()!r}") from None


def hundredths_to_decimal(value: int) -> Decimal:
    return Decimal(value).scaleb(-2)


@dataclass(frozen=True)
class Rating:
    player: str
    position: Position
    hundredths: int

    @property
    def rating(self) -> Decimal:
        return hundredths_to_decimal(self.hundredths)


@dataclass(frozen=True)
class RatingTable:
    """Sparse player x position ratings, stored as integer hundredths.

    ``entries`` keeps input order; ``players`` lists names by first appearance.
    """

    entries: tuple[Rating, ...] = ()
    _lookup: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        lookup = {}
        for entry in self.entries:
            key = (entry.player, entry.position)
            if key in lookup:
                raise RosterError(f"duplicate rating for ({entry.player}, {entry.position})")
            if entry.hundredths <= 0:
                raise RosterError(f"rating for ({entry.player}, {entry.position}) must be positive")
            lookup[key] = entry
        object.__setattr__(self, "_lookup", lookup)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Rating]:
        return iter(self.entries)

    def __contains__(self, key: object) -> bool:
        return key in self._lookup

    @property
    def players(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(e.player for e in self.entries))

    @property
    def positions(self) -> frozenset[Position]:
        return frozenset(e.position for e in self.entries)

    def get(self, player: str, position: Position) -> Rating:
        return self._lookup[(player, position)]


_RATING_RE = re.compile(r"^\d+\.\d{1,2}$")


def _parse_hundredths(text: str) -> int:
    whole, frac = text.split(".")
    return int(whole) * 100 + int(frac.ljust(2, "0"))


def parse_roster(source: str) -> RatingTable:
    """Parse roster CSV text (header ``player,position,rating``)."""
    reader = csv.reader(io.StringIO(source))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["player", "position", "rating"]:
        raise RosterError("roster header must be 'player,position,rating'")

    entries = []
    seen = set()
    # header is line 1, so data rows start at 2
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 3:
            raise RosterError(f"row {lineno}: expected 3 fields, got {len(row)}")
        player, token, rating = (cell.strip() for cell in row)
        if not player:
            raise RosterError(f"row {lineno}: empty player name")
        try:
            position = Position.parse(token)
        except ValueError:
            raise RosterError(f"row {lineno}: unknown position code {token!r}") from None
        if not _RATING_RE.match(rating):
            raise RosterError(f"row {lineno}: malformed rating {rating!r}")
        hundredths = _parse_hundredths(rating)
        if hundredths <= 0:
            raise RosterError(f"row {lineno}: rating must be positive, got {rating}")
        if (player, position) in seen:
            raise RosterError(f"row {lineno}: duplicate pair ({player}, {position})")
        seen.add((player, position))
        entries.append(Rating(player, position, hundredths))
    return RatingTable(tuple(entries))


def load_roster(path: str | Path) -> RatingTable:
    return parse_roster(Path(path).read_text(encoding="utf-8"))


def data_path(name: str) -> Path:
    """Path to a bundled fixture file."""
    return Path(str(resources.files("lineup_bqm") / "data" / name))


def paper_roster() -> RatingTable:
    """The bundled 23-player, 43-rating Liverpool FC roster."""
    return load_roster(data_path("figure1.csv"))


@dataclass(frozen=True)
class VariableIndex:
    """Bijection between (player, position) pairs and variable ids 1..n.

    Ids run column-major: every GK entry first, then DC, and so on through FW.
    Within a column, players keep their first-appearance order in the table.
    """

    order: tuple[tuple[str, Position], ...]
    _ids: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        ids = {pair: i for i, pair in enumerate(self.order, start=1)}
        if len(ids) != len(self.order):
            raise ValueError("variable index contains a repeated (player, position) pair")
        object.__setattr__(self, "_ids", ids)

    @property
    def n(self) -> int:
        return len(self.order)

    def pair(self, var: int) -> tuple[str, Position]:
        if not 1 <= var <= self.n:
            raise IndexError(f"variable id {var} outside 1..{self.n}")
        return self.order[var - 1]

    def id_of(self, player: str, position: Position) -> int:
        return self._ids[(player, position)]

    def ids_for_position(self, position: Position) -> list[int]:
        return [i for i, (_, pos) in enumerate(self.order, start=1) if pos == position]

    def ids_for_player(self, player: str) -> list[int]:
        return [i for i, (name, _) in enumerate(self.order, start=1) if name == player]

    @property
    def players(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(name for name, _ in self.order))


def build_variable_index(table: RatingTable) -> VariableIndex:
    if len(table) == 0:
        raise ValueError("cannot index an empty rating table")
    rank = {name: k for k, name in enumerate(table.players)}
    pairs = sorted(((e.player, e.position) for e in table), key=lambda p: (p[1], rank[p[0]]))
    return VariableIndex(tuple(pairs))


def objective_coefficients(index: VariableIndex, table: RatingTable) -> list[Decimal]:
    """Rating of each variable, position ``i - 1`` holding variable ``i``."""
    return [table.get(player, pos).rating for player, pos in index.order]


def bits_from_ids(ids: Sequence[int], num_vars: int) -> tuple[int, ...]:
    """Bit vector of length ``num_vars`` with exactly ``ids`` set (1-based)."""
    bits = [0] * num_vars
    for i in ids:
        bits[i - 1] = 1
    return tuple(bits)
