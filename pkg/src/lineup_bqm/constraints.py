"""Formation quotas and one-position-per-player conflicts as linear constraints."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .roster import Position, VariableIndex, build_variable_index, data_path, paper_roster


class InfeasibleError(ValueError):
    """A formation cannot be filled from the roster."""

    def __init__(self, message: str, group: str | None = None):
        super().__init__(message)
        self.group = group


class Comparator(enum.Enum):
    EQUAL = "="
    AT_MOST = "<="


@dataclass(frozen=True)
class LinearConstraint:
    """``sum(coef * x[var]) <comparator> rhs`` over 1-based variable ids."""

    terms: Mapping[int, int]
    comparator: Comparator
    rhs: int
    label: str = ""

    def __post_init__(self) -> None:
        if not self.terms:
            raise ValueError("constraint needs at least one term")
        if self.rhs < 0:
            raise ValueError("constraint rhs must be non-negative")
        object.__setattr__(self, "terms", dict(sorted(self.terms.items())))

    @classmethod
    def selection(cls, ids: Iterable[int], comparator: Comparator, rhs: int, label: str = ""):
        return cls({i: 1 for i in ids}, comparator, rhs, label)

    @property
    def ids(self) -> tuple[int, ...]:
        return tuple(self.terms)

    def lhs(self, bits) -> int:
        return sum(a * bits[i - 1] for i, a in self.terms.items())

    def satisfied(self, bits) -> bool:
        value = self.lhs(bits)
        if self.comparator is Comparator.EQUAL:
            return value == self.rhs
        return value <= self.rhs

    def __str__(self) -> str:
        lhs = " + ".join(f"x_{i}" if a == 1 else f"{a}*x_{i}" for i, a in self.terms.items())
        return f"{lhs} {self.comparator.value} {self.rhs}"


class ConflictMode(enum.Enum):
    AUTO = "auto"
    PAPER = "paper"


_NOUNS = {
    Position.GK: ("goalkeeper", "goalkeepers"),
    Position.DC: ("central defender", "central defenders"),
    Position.DL: ("left-hand side defender", "left-hand side defenders"),
    Position.DR: ("right-hand side defender", "right-hand side defenders"),
    Position.DM: ("defensive midfielder", "defensive midfielders"),
    Position.CM: ("central midfielder", "central midfielders"),
    Position.AM: ("attacking midfielder", "attacking midfielders"),
    Position.FWL: ("left forward", "left forwards"),
    Position.FWR: ("right forward", "right forwards"),
    Position.FW: ("forward/striker", "forwards/strikers"),
}


def quota_label(position: Position, quota: int) -> str:
    singular, plural = _NOUNS[position]
    return f"{quota} {singular if quota == 1 else plural}"


@dataclass(frozen=True)
class FormationSpec:
    name: str
    quotas: Mapping[Position, int]
    total: int

    def __post_init__(self) -> None:
        quotas = {Position.parse(k) if isinstance(k, str) else Position(k): int(v)
                  for k, v in self.quotas.items()}
        if any(q < 0 for q in quotas.values()):
            raise ValueError(f"formation {self.name}: quotas must be non-negative")
        if self.total <= 0:
            raise ValueError(f"formation {self.name}: total must be positive")
        if sum(quotas.values()) != self.total:
            raise ValueError(
                f"formation {self.name}: quotas sum to {sum(quotas.values())}, total is {self.total}")
        object.__setattr__(self, "quotas", dict(sorted(quotas.items())))

    @classmethod
    def from_dict(cls, data: Mapping) -> "FormationSpec":
        return cls(name=str(data["name"]), quotas=data["quotas"], total=int(data["total"]))

    def to_dict(self) -> dict:
        return {"name": self.name, "total": self.total,
                "quotas": {p.name: q for p, q in self.quotas.items()}}


BUILTIN_FORMATIONS = ("4-3-3", "4-2-3-1")


def load_formation(name_or_path: str | Path) -> FormationSpec:
    """Resolve a built-in formation name, or read a formation JSON file."""
    if str(name_or_path) in BUILTIN_FORMATIONS:
        path = data_path(f"{name_or_path}.json")
    else:
        path = Path(name_or_path)
    with open(path, encoding="utf-8") as fh:
        return FormationSpec.from_dict(json.load(fh))


def formation_constraints(spec: FormationSpec, index: VariableIndex) -> list[LinearConstraint]:
    """Total-players equality plus one equality per position with a positive quota.

    Positions with quota 0 get no constraint of their own; the total forces them off.
    """
    out = [LinearConstraint.selection(range(1, index.n + 1), Comparator.EQUAL, spec.total,
                                      f"{spec.total} players")]
    for position, quota in spec.quotas.items():
        if quota == 0:
            continue
        ids = index.ids_for_position(position)
        label = quota_label(position, quota)
        if not ids:
            raise InfeasibleError(
                f"no {position} candidates in the roster for constraint '{label}'", group=label)
        out.append(LinearConstraint.selection(ids, Comparator.EQUAL, quota, label))
    return out


# Conflict rows exactly as printed for the 43-variable roster; Fabinho, Firmino,
# Minamino and Origi are missing from the published list.
PAPER_CONFLICT_IDS = (
    (8, 12, 17),
    (9, 13),
    (10, 14, 18),
    (15, 20, 29),
    (11, 22),
    (16, 24),
    (26, 30),
    (32, 34),
    (37, 40),
    (28, 33, 35, 38, 42),
)
# Printed without a slack variable, which turns it into "Jota plays exactly once".
PAPER_UNSLACKED_IDS = frozenset({28, 33, 35, 38, 42})


def conflict_label(player: str) -> str:
    return f"one position for {player}"


def _is_paper_index(index: VariableIndex) -> bool:
    return index.n == 43 and index == build_variable_index(paper_roster())


def conflict_constraints(index: VariableIndex,
                         mode: ConflictMode = ConflictMode.AUTO) -> list[LinearConstraint]:
    mode = ConflictMode(mode)
    if mode is ConflictMode.PAPER:
        if not _is_paper_index(index):
            raise ValueError("paper conflict mode only applies to the bundled 43-variable roster")
        return [LinearConstraint.selection(ids, Comparator.AT_MOST, 1,
                                           conflict_label(index.pair(ids[0])[0]))
                for ids in PAPER_CONFLICT_IDS]

    out = []
    for player in index.players:
        ids = index.ids_for_player(player)
        if len(ids) >= 2:
            out.append(LinearConstraint.selection(ids, Comparator.AT_MOST, 1,
                                                  conflict_label(player)))
    return out
