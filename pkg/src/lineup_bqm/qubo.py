"""Penalty compilation of the line-up problem into a binary quadratic model.

Every coefficient is a :class:`~decimal.Decimal` computed under a context that
traps inexact results, so published energies can be asserted with ``==``.
"""

from __future__ import annotations

import decimal
from dataclasses import dataclass, field
from decimal import Decimal
from itertools import combinations
from typing import Iterable, Mapping, Sequence

import numpy as np

from .constraints import (
    PAPER_UNSLACKED_IDS,
    Comparator,
    ConflictMode,
    LinearConstraint,
)

_EXACT = decimal.Context(
    prec=60,
    traps=[decimal.Inexact, decimal.InvalidOperation, decimal.DivisionByZero, decimal.Overflow],
)

DEFAULT_LAMBDA = Decimal("90.5")


def to_decimal(value) -> Decimal:
    """Exact Decimal from int, str or Decimal; floats go through their repr."""
    if isinstance(value, Decimal):
        return value
    if isinstance(value, float):
        return Decimal(repr(value))
    return Decimal(value)


def format_decimal(value: Decimal) -> str:
    text = format(value.normalize(_EXACT), "f")
    return "0" if text in ("-0", "0") else text


@dataclass(frozen=True)
class Bqm:
    """``offset + sum(linear[i] x_i) + sum(quadratic[i, j] x_i x_j)`` over ids 1..num_vars."""

    num_vars: int
    linear: Mapping[int, Decimal] = field(default_factory=dict)
    quadratic: Mapping[tuple[int, int], Decimal] = field(default_factory=dict)
    offset: Decimal = Decimal(0)

    def __post_init__(self) -> None:
        linear = {int(i): to_decimal(v) for i, v in sorted(self.linear.items())}
        quadratic = {}
        for (i, j), v in sorted(self.quadratic.items()):
            if i == j:
                raise ValueError(f"quadratic key ({i}, {j}) is a diagonal term; fold it into linear")
            if i > j:
                i, j = j, i
            v = to_decimal(v)
            if v != 0:
                quadratic[(i, j)] = _EXACT.add(quadratic.get((i, j), Decimal(0)), v)
        for i in list(linear) + [k for pair in quadratic for k in pair]:
            if not 1 <= i <= self.num_vars:
                raise ValueError(f"variable id {i} outside 1..{self.num_vars}")
        object.__setattr__(self, "linear", linear)
        object.__setattr__(self, "quadratic", quadratic)
        object.__setattr__(self, "offset", to_decimal(self.offset))

    def energy(self, bits: Sequence[int]) -> Decimal:
        if len(bits) != self.num_vars:
            raise ValueError(f"assignment has {len(bits)} bits, model has {self.num_vars} variables")
        with decimal.localcontext(_EXACT):
            total = self.offset
            for i, v in self.linear.items():
                if bits[i - 1]:
                    total += v
            for (i, j), v in self.quadratic.items():
                if bits[i - 1] and bits[j - 1]:
                    total += v
        return total

    def __add__(self, other: "Bqm") -> "Bqm":
        with decimal.localcontext(_EXACT):
            linear = dict(self.linear)
            for i, v in other.linear.items():
                linear[i] = linear.get(i, Decimal(0)) + v
            quadratic = dict(self.quadratic)
            for k, v in other.quadratic.items():
                quadratic[k] = quadratic.get(k, Decimal(0)) + v
            return Bqm(max(self.num_vars, other.num_vars), linear, quadratic,
                       self.offset + other.offset)

    def scaled(self, factor) -> "Bqm":
        factor = to_decimal(factor)
        with decimal.localcontext(_EXACT):
            return Bqm(self.num_vars,
                       {i: v * factor for i, v in self.linear.items()},
                       {k: v * factor for k, v in self.quadratic.items()},
                       self.offset * factor)

    def resized(self, num_vars: int) -> "Bqm":
        return Bqm(num_vars, self.linear, self.quadratic, self.offset)

    def integer_form(self):
        """Integer arrays ``(linear, Q, offset, scale)`` with ``energy = (offset + ...) / scale``.

        ``Q`` is a dense symmetric matrix with a zero diagonal, so a variable's
        local field is ``linear[i] + Q[i] @ x``.
        """
        values = [self.offset, *self.linear.values(), *self.quadratic.values()]
        digits = max((-v.normalize(_EXACT).as_tuple().exponent for v in values), default=0)
        scale = 10 ** max(digits, 0)

        def as_int(v: Decimal) -> int:
            return int(_EXACT.multiply(v, scale))

        lin = np.zeros(self.num_vars, dtype=np.int64)
        quad = np.zeros((self.num_vars, self.num_vars), dtype=np.int64)
        bound = abs(as_int(self.offset))
        for i, v in self.linear.items():
            lin[i - 1] = as_int(v)
            bound += abs(as_int(v))
        for (i, j), v in self.quadratic.items():
            quad[i - 1, j - 1] = quad[j - 1, i - 1] = as_int(v)
            bound += abs(as_int(v))
        if bound >= 2**62:
            raise OverflowError("model coefficients too large for 64-bit integer evaluation")
        return lin, quad, as_int(self.offset), scale

    def dumps(self) -> str:
        """Plain-text interchange: ``offset v`` / ``lin i v`` / ``quad i j v`` records.

        The offset line is omitted when zero; every variable gets a ``lin`` line.
        """
        lines = []
        if self.offset != 0:
            lines.append(f"offset {format_decimal(self.offset)}")
        for i in range(1, self.num_vars + 1):
            lines.append(f"lin {i} {format_decimal(self.linear.get(i, Decimal(0)))}")
        for (i, j), v in self.quadratic.items():
            lines.append(f"quad {i} {j} {format_decimal(v)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Bqm":
        offset = Decimal(0)
        linear: dict[int, Decimal] = {}
        quadratic: dict[tuple[int, int], Decimal] = {}
        num_vars = 0
        for lineno, raw in enumerate(text.splitlines(), start=1):
            parts = raw.split()
            if not parts:
                continue
            kind = parts[0]
            try:
                if kind == "offset" and len(parts) == 2:
                    offset = Decimal(parts[1])
                elif kind == "lin" and len(parts) == 3:
                    i = int(parts[1])
                    linear[i] = Decimal(parts[2])
                    num_vars = max(num_vars, i)
                elif kind == "quad" and len(parts) == 4:
                    i, j = int(parts[1]), int(parts[2])
                    if not i < j:
                        raise ValueError("quad record needs i < j")
                    quadratic[(i, j)] = Decimal(parts[3])
                    num_vars = max(num_vars, j)
                else:
                    raise ValueError(f"unrecognised record {raw!r}")
            except (ValueError, decimal.InvalidOperation) as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
        return cls(num_vars, linear, quadratic, offset)


def energy(bqm: Bqm, bits: Sequence[int]) -> Decimal:
    return bqm.energy(bits)


class SlackRegistry:
    """Slack variable ids, handed out contiguously after the decision variables."""

    def __init__(self, num_decision: int):
        self.num_decision = num_decision
        self.entries: dict[str, list[int]] = {}
        self._next = num_decision + 1

    def allocate(self, label: str, count: int) -> list[int]:
        if label in self.entries:
            raise ValueError(f"slack already allocated for constraint {label!r}")
        ids = list(range(self._next, self._next + count))
        self._next += count
        self.entries[label] = ids
        return ids

    @property
    def size(self) -> int:
        return self._next - self.num_decision - 1

    @property
    def num_vars(self) -> int:
        return self._next - 1

    def slack_ids(self) -> list[int]:
        return [i for ids in self.entries.values() for i in ids]

    def __repr__(self) -> str:
        return f"SlackRegistry(num_decision={self.num_decision}, entries={self.entries})"


def encode_equality(c: LinearConstraint, num_vars: int | None = None) -> Bqm:
    """Expand ``(sum a_i x_i - b)^2`` using ``x_i^2 = x_i``."""
    if c.comparator is not Comparator.EQUAL:
        raise ValueError(f"encode_equality needs an equality constraint, got {c.comparator.value}")
    b = c.rhs
    linear = {i: Decimal(a * (a - 2 * b)) for i, a in c.terms.items()}
    quadratic = {(i, j): Decimal(2 * c.terms[i] * c.terms[j]) for i, j in combinations(c.terms, 2)}
    return Bqm(num_vars or max(c.terms), linear, quadratic, Decimal(b * b))


def slack_range(c: LinearConstraint) -> int:
    """Largest value the slack must absorb: ``rhs`` minus the smallest reachable lhs."""
    return c.rhs - sum(min(0, a) for a in c.terms.values())


def encode_inequality(c: LinearConstraint, registry: SlackRegistry, *,
                      with_slack: bool = True) -> Bqm:
    """Turn ``sum a_i x_i <= b`` into ``(sum a_i x_i + s - b)^2`` with binary-expanded ``s``.

    A constraint whose slack range is zero (``rhs == 0`` for non-negative
    coefficients) is encoded as the equality it already is.
    """
    if c.comparator is not Comparator.AT_MOST:
        raise ValueError(f"encode_inequality needs an at-most constraint, got {c.comparator.value}")
    as_equality = LinearConstraint(c.terms, Comparator.EQUAL, c.rhs, c.label)
    width = slack_range(c)
    if not with_slack or width == 0:
        return encode_equality(as_equality)
    ids = registry.allocate(c.label, width.bit_length())
    terms = dict(c.terms)
    terms.update({sid: 1 << k for k, sid in enumerate(ids)})
    return encode_equality(LinearConstraint(terms, Comparator.EQUAL, c.rhs, c.label))


def _unslacked(c: LinearConstraint, mode: ConflictMode) -> bool:
    return mode is ConflictMode.PAPER and frozenset(c.terms) == PAPER_UNSLACKED_IDS


def assemble(objective: Sequence, equalities: Iterable[LinearConstraint] = (),
             inequalities: Iterable[LinearConstraint] = (), lam=DEFAULT_LAMBDA,
             mode: ConflictMode = ConflictMode.AUTO) -> tuple[Bqm, SlackRegistry]:
    """Minimisation model ``-objective . x + lam * (sum of squared penalties)``."""
    lam = to_decimal(lam)
    if lam <= 0:
        raise ValueError(f"penalty weight must be positive, got {lam}")
    mode = ConflictMode(mode)
    n = len(objective)
    equalities = list(equalities)
    inequalities = list(inequalities)
    for c in equalities + inequalities:
        if min(c.terms) < 1 or max(c.terms) > n:
            raise ValueError(f"constraint '{c.label}' references ids outside 1..{n}")

    registry = SlackRegistry(n)
    penalty = Bqm(n)
    for c in equalities:
        penalty = penalty + encode_equality(c, n)
    for c in inequalities:
        penalty = penalty + encode_inequality(c, registry, with_slack=not _unslacked(c, mode))

    base = Bqm(n, {i: -to_decimal(r) for i, r in enumerate(objective, start=1)})
    return (base + penalty.scaled(lam)).resized(registry.num_vars), registry


def fill_slacks(decision_bits: Sequence[int], inequalities: Iterable[LinearConstraint],
                registry: SlackRegistry) -> tuple[int, ...]:
    """Extend decision bits with the slack setting that zeroes each slack penalty.

    Violated constraints get the nearest slack value, so their penalty stays visible.
    """
    n = registry.num_decision
    bits = list(decision_bits[:n]) + [0] * registry.size
    for c in inequalities:
        ids = registry.entries.get(c.label)
        if not ids:
            continue
        s = min(max(c.rhs - c.lhs(bits), 0), (1 << len(ids)) - 1)
        for k, sid in enumerate(ids):
            bits[sid - 1] = (s >> k) & 1
    return tuple(bits)
