"""Minimum-energy search: an exact line-up oracle, brute-force BQM minimisation
and a seeded simulated-annealing sampler.

The BQM solvers run on the integer form of the model (coefficients scaled by a
power of ten), so every energy they report is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from itertools import combinations
from typing import Sequence

import numba
import numpy as np

from .constraints import (
    ConflictMode,
    FormationSpec,
    InfeasibleError,
    LinearConstraint,
    conflict_constraints,
    quota_label,
)
from .qubo import _EXACT, Bqm
from .roster import RatingTable, build_variable_index
from .verify import LineupSolution, lineup_from_ids

EXHAUSTIVE_MAX_VARS = 25


@dataclass(frozen=True)
class Sample:
    bits: tuple[int, ...]
    energy: Decimal


@dataclass(frozen=True)
class AnnealParams:
    num_reads: int = 64
    sweeps_per_read: int = 2000
    beta_hot: float = 0.01
    beta_cold: float = 10.0
    seed: int = 1

    def __post_init__(self) -> None:
        if self.num_reads < 1:
            raise ValueError("num_reads must be positive")
        if self.sweeps_per_read < 0:
            raise ValueError("sweeps_per_read must be non-negative")
        if not 0 < self.beta_hot < self.beta_cold:
            raise ValueError("need 0 < beta_hot < beta_cold")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def betas(self) -> np.ndarray:
        """Geometric inverse-temperature schedule, one value per sweep."""
        return np.geomspace(self.beta_hot, self.beta_cold, self.sweeps_per_read)


def _energy_from_int(total: int, scale: int) -> Decimal:
    return _EXACT.divide(Decimal(int(total)), Decimal(scale))


# -- exact line-up oracle ---------------------------------------------------


def exact_lineup(table: RatingTable, spec: FormationSpec,
                 conflicts: Sequence[LinearConstraint] | None = None) -> LineupSolution:
    """Best line-up by enumerating quota-sized subsets of each position group.

    Groups are searched in position order and subsets in lexicographic order,
    which makes the first maximum found the one with the lexicographically
    smallest id tuple. Branches whose optimistic bound cannot beat the best
    total so far are skipped. ``conflicts`` defaults to one-position-per-player.
    """
    index = build_variable_index(table)
    if conflicts is None:
        conflicts = conflict_constraints(index, ConflictMode.AUTO)
    ratings = {i: table.get(*index.pair(i)).hundredths for i in range(1, index.n + 1)}

    groups = []
    for position, quota in spec.quotas.items():
        if quota == 0:
            continue
        ids = index.ids_for_position(position)
        label = quota_label(position, quota)
        if len(ids) < quota:
            raise InfeasibleError(
                f"'{label}' needs {quota} {position} players, roster has {len(ids)}", group=label)
        combos = [(c, sum(ratings[i] for i in c)) for c in combinations(ids, quota)]
        groups.append((label, combos))

    # Conflict rows with only non-negative coefficients can be checked as the
    # search goes; anything else waits for a complete line-up.
    monotone = [c for c in conflicts if all(a >= 0 for a in c.terms.values())]
    deferred = [c for c in conflicts if c not in monotone]
    touches: dict[int, list[tuple[int, int]]] = {}
    for k, c in enumerate(monotone):
        for i, a in c.terms.items():
            touches.setdefault(i, []).append((k, a))
    load = [0] * len(monotone)
    limits = [c.rhs for c in monotone]

    bound = [0] * (len(groups) + 1)
    for g in range(len(groups) - 1, -1, -1):
        bound[g] = bound[g + 1] + max(score for _, score in groups[g][1])

    best_total = -1
    best_ids: tuple[int, ...] | None = None
    deepest_fail = 0
    chosen: list[int] = []

    def search(g: int, total: int) -> None:
        nonlocal best_total, best_ids, deepest_fail
        if g == len(groups):
            if total > best_total:
                bits = {i: 1 for i in chosen}
                if all(sum(a * bits.get(i, 0) for i, a in c.terms.items()) <= c.rhs
                       for c in deferred):
                    best_total, best_ids = total, tuple(chosen)
            return
        for combo, score in groups[g][1]:
            if total + score + bound[g + 1] <= best_total:
                continue
            ok = True
            applied = []
            for i in combo:
                for k, a in touches.get(i, ()):
                    load[k] += a
                    applied.append((k, a))
                    if load[k] > limits[k]:
                        ok = False
            if ok:
                chosen.extend(combo)
                search(g + 1, total + score)
                del chosen[-len(combo):]
            else:
                deepest_fail = max(deepest_fail, g)
            for k, a in applied:
                load[k] -= a

    search(0, 0)
    if best_ids is None:
        label = groups[deepest_fail][0] if groups else "total"
        raise InfeasibleError(f"no conflict-free line-up fills '{label}'", group=label)
    return lineup_from_ids(best_ids, index, table)


# -- brute force over all assignments ---------------------------------------


@numba.njit(cache=True)
def _gray_code_minimum(lin, quad, offset):
    n = lin.shape[0]
    x = np.zeros(n, dtype=np.int8)
    field = lin.copy()
    e = offset
    best = e
    best_code = 0
    code = 0
    for k in range(1, 1 << n):
        i = 0
        while not (k >> i) & 1:
            i += 1
        if x[i]:
            e -= field[i]
            x[i] = 0
            for j in range(n):
                field[j] -= quad[i, j]
        else:
            e += field[i]
            x[i] = 1
            for j in range(n):
                field[j] += quad[i, j]
        code ^= 1 << i
        if e < best or (e == best and code < best_code):
            best = e
            best_code = code
    return best, best_code


def exhaustive_minimize(bqm: Bqm) -> Sample:
    """Global minimum over all ``2**num_vars`` assignments.

    Ties go to the assignment with the smallest integer value when ``x_1`` is
    the least significant bit.
    """
    if bqm.num_vars > EXHAUSTIVE_MAX_VARS:
        raise ValueError(
            f"exhaustive search is capped at {EXHAUSTIVE_MAX_VARS} variables "
            f"(model has {bqm.num_vars}); use the annealer instead")
    lin, quad, offset, scale = bqm.integer_form()
    if bqm.num_vars == 0:
        return Sample((), _energy_from_int(offset, scale))
    best, code = _gray_code_minimum(lin, quad, np.int64(offset))
    bits = tuple((int(code) >> k) & 1 for k in range(bqm.num_vars))
    return Sample(bits, _energy_from_int(best, scale))


# -- simulated annealing ----------------------------------------------------


@numba.njit(cache=True)
def _anneal_read(lin, quad, x, betas, perm, threshold, trace):
    """One Metropolis read from state ``x``; ``betas`` are already divided by the scale.

    A flip raising the energy by ``delta`` is accepted when
    ``beta * delta < threshold``, with ``threshold = -log(u)`` for uniform ``u``.

    Returns the best energy seen (without offset) and writes the best state
    back into ``x``. When ``trace`` has rows, the energy after each attempted
    flip is stored there.
    """
    n = lin.shape[0]
    field = lin.copy()
    e = 0
    for i in range(n):
        if x[i]:
            e += lin[i]
            for j in range(n):
                field[j] += quad[i, j]
    for i in range(n):
        if x[i]:
            for j in range(i + 1, n):
                if x[j]:
                    e += quad[i, j]
    best = e
    best_x = x.copy()
    record = trace.shape[0] > 0
    for s in range(betas.shape[0]):
        beta = betas[s]
        for k in range(n):
            i = perm[s, k]
            delta = -field[i] if x[i] else field[i]
            if delta <= 0 or beta * delta < threshold[s, k]:
                sign = -1 if x[i] else 1
                x[i] = 1 - x[i]
                e += delta
                for j in range(n):
                    field[j] += sign * quad[i, j]
                if e < best:
                    best = e
                    best_x[:] = x
            if record:
                trace[s, k] = e
    x[:] = best_x
    return best


@numba.njit(cache=True)
def _visit_orders(uniform):
    """Fisher-Yates shuffle of ``0..n-1`` for every row of ``uniform``."""
    sweeps, n = uniform.shape
    orders = np.empty((sweeps, n), dtype=np.int64)
    for s in range(sweeps):
        for i in range(n):
            orders[s, i] = i
        for i in range(n - 1, 0, -1):
            j = int(uniform[s, i] * (i + 1))
            orders[s, i], orders[s, j] = orders[s, j], orders[s, i]
    return orders


def read_randomness(seed: int, read: int, num_vars: int, sweeps: int):
    """Initial state, per-sweep visit orders and Metropolis thresholds for one read.

    Each read draws from its own stream keyed on ``(seed, read)``, so reads are
    independent of each other and of how they are scheduled. Thresholds are
    unit exponentials, i.e. ``-log(u)`` for uniform ``u``.
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed, read]))
    x0 = rng.integers(0, 2, num_vars, dtype=np.int8)
    orders = _visit_orders(rng.random((sweeps, num_vars)))
    threshold = rng.standard_exponential((sweeps, num_vars))
    return x0, orders, threshold


_NO_TRACE = np.zeros((0, 0), dtype=np.int64)


def simulated_anneal(bqm: Bqm, params: AnnealParams = AnnealParams()) -> list[Sample]:
    """Independent single-flip Metropolis restarts; samples sorted best first.

    Each read reports the lowest-energy state it visited. Output is a pure
    function of ``(bqm, params)``.
    """
    lin, quad, offset, scale = bqm.integer_form()
    betas = params.betas() / scale
    samples = []
    for read in range(params.num_reads):
        x, perm, threshold = read_randomness(params.seed, read, bqm.num_vars,
                                             params.sweeps_per_read)
        best = _anneal_read(lin, quad, x, betas, perm, threshold, _NO_TRACE)
        samples.append(Sample(tuple(int(b) for b in x), _energy_from_int(best + offset, scale)))
    samples.sort(key=lambda s: s.energy)
    return samples

