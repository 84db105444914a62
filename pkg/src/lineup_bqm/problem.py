"""One line-up instance: roster, formation, conflicts and penalty weight wired together."""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from functools import cached_property
from typing import Sequence

from .constraints import (
    ConflictMode,
    FormationSpec,
    LinearConstraint,
    conflict_constraints,
    formation_constraints,
)
from .qubo import DEFAULT_LAMBDA, Bqm, SlackRegistry, assemble, fill_slacks, to_decimal
from .roster import RatingTable, VariableIndex, bits_from_ids, build_variable_index, objective_coefficients
from .verify import FeasibilityReport, LineupSolution, check_feasibility, decode_lineup


@dataclass
class LineupProblem:
    table: RatingTable
    formation: FormationSpec
    mode: ConflictMode = ConflictMode.AUTO
    lam: Decimal = field(default=DEFAULT_LAMBDA)

    def __post_init__(self) -> None:
        self.mode = ConflictMode(self.mode)
        self.lam = to_decimal(self.lam)

    @cached_property
    def index(self) -> VariableIndex:
        return build_variable_index(self.table)

    @cached_property
    def equalities(self) -> list[LinearConstraint]:
        return formation_constraints(self.formation, self.index)

    @cached_property
    def conflicts(self) -> list[LinearConstraint]:
        return conflict_constraints(self.index, self.mode)

    @cached_property
    def compiled(self) -> tuple[Bqm, SlackRegistry]:
        return assemble(objective_coefficients(self.index, self.table), self.equalities,
                        self.conflicts, self.lam, self.mode)

    @property
    def bqm(self) -> Bqm:
        return self.compiled[0]

    @property
    def registry(self) -> SlackRegistry:
        return self.compiled[1]

    def full_bits(self, lineup: LineupSolution) -> tuple[int, ...]:
        """Decision bits of ``lineup`` plus the slack bits that satisfy the conflicts."""
        decision = bits_from_ids(lineup.variables, self.index.n)
        return fill_slacks(decision, self.conflicts, self.registry)

    def decode(self, bits: Sequence[int]) -> LineupSolution:
        return decode_lineup(bits[: self.index.n], self.index, self.table)

    def feasibility(self, bits: Sequence[int]) -> FeasibilityReport:
        return check_feasibility(bits[: self.index.n], self.equalities, self.conflicts)
