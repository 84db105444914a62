"""Command-line interface: ``solve``, ``export-bqm`` and ``compare``.

Exit codes: 0 success, 1 usage / I/O / parse error, 2 infeasible result,
3 ``compare`` found a difference.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from decimal import Decimal, InvalidOperation
from pathlib import Path

from .constraints import BUILTIN_FORMATIONS, ConflictMode, InfeasibleError, load_formation
from .problem import LineupProblem
from .qubo import DEFAULT_LAMBDA, format_decimal
from .roster import data_path, load_roster
from .solvers import EXHAUSTIVE_MAX_VARS, AnnealParams, exact_lineup, exhaustive_minimize, simulated_anneal
from .verify import compare, load_lineup

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE, EXIT_DIFFERS = 0, 1, 2, 3


def _decimal(text: str) -> Decimal:
    try:
        return Decimal(text)
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not a decimal number: {text!r}") from None


def _add_model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--roster", default=str(data_path("figure1.csv")),
                   help="roster CSV (default: bundled Liverpool FC ratings)")
    p.add_argument("--formation", default="4-3-3",
                   help=f"built-in name ({', '.join(BUILTIN_FORMATIONS)}) or formation JSON path")
    p.add_argument("--lambda", dest="lam", type=_decimal, default=DEFAULT_LAMBDA,
                   help="penalty weight shared by all constraints (default 90.5)")
    p.add_argument("--conflicts", choices=[m.value for m in ConflictMode], default="auto",
                   help="'auto' adds one conflict row per multi-position player; "
                        "'paper' uses the published ten rows (bundled roster only)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lineup-bqm",
                                     description="Soccer line-up selection as a binary quadratic model.")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="compile and solve a line-up instance")
    _add_model_args(solve)
    solve.add_argument("--solver", choices=["exact", "exhaustive", "anneal"], default="exact")
    defaults = AnnealParams()
    solve.add_argument("--reads", type=int, default=defaults.num_reads)
    solve.add_argument("--sweeps", type=int, default=defaults.sweeps_per_read)
    solve.add_argument("--beta-hot", type=float, default=defaults.beta_hot)
    solve.add_argument("--beta-cold", type=float, default=defaults.beta_cold)
    solve.add_argument("--seed", type=int, default=defaults.seed)
    solve.add_argument("--format", choices=["table", "json"], default="table")

    export = sub.add_parser("export-bqm", help="write the compiled model as text records")
    _add_model_args(export)
    export.add_argument("--out", required=True, help="output path ('-' for stdout)")

    cmp_ = sub.add_parser("compare", help="diff two line-up CSV files")
    cmp_.add_argument("found")
    cmp_.add_argument("reference")
    return parser


def _load_problem(args) -> LineupProblem:
    table = load_roster(args.roster)
    formation = load_formation(args.formation)
    return LineupProblem(table, formation, ConflictMode(args.conflicts), args.lam)


def _render_table(payload: dict) -> str:
    lines = [f"formation {payload['formation']} | solver {payload['solver']} | "
             f"conflicts {payload['conflicts']} | lambda {payload['lambda']}"]
    if payload["picks"]:
        width = max(len("Player Name"), *(len(p["player"]) for p in payload["picks"]))
        lines.append(f"{'Binary variable':<17}{'Player Name':<{width + 2}}{'Position':<10}Rating")
        for p in payload["picks"]:
            lines.append(f"{'x_' + str(p['variable']):<17}{p['player']:<{width + 2}}"
                         f"{p['position']:<10}{p['rating']}")
    lines.append(f"Max H_Z {payload['total_rating']}")
    if payload["energy"] is not None:
        lines.append(f"energy {payload['energy']}")
    status = "feasible" if payload["feasible"] else "INFEASIBLE"
    lines.append(f"constraints: {status}")
    for c in payload["constraints"]:
        mark = "ok" if c["satisfied"] else "VIOLATED"
        lhs = "-" if c["lhs"] is None else c["lhs"]
        lines.append(f"  {c['label']}: {lhs} {c['comparator']} {c['rhs']} [{mark}]")
    lines.append(f"time {payload['wall_clock_s']:.3f} s")
    return "\n".join(lines)


def _emit(payload: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(payload, indent=2, ensure_ascii=False))
    else:
        print(_render_table(payload))


def cmd_solve(args) -> int:
    start = time.perf_counter()
    try:
        problem = _load_problem(args)
        params = AnnealParams(args.reads, args.sweeps, args.beta_hot, args.beta_cold, args.seed)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    payload = {"formation": None, "solver": args.solver, "conflicts": args.conflicts,
               "lambda": format_decimal(args.lam), "picks": [], "total_rating": "0.00",
               "energy": None, "feasible": False, "constraints": []}

    try:
        payload["formation"] = problem.formation.name
        bqm = problem.bqm
        if args.solver == "exact":
            lineup = exact_lineup(problem.table, problem.formation, problem.conflicts)
            bits = problem.full_bits(lineup)
        elif args.solver == "exhaustive":
            if bqm.num_vars > EXHAUSTIVE_MAX_VARS:
                print(f"error: exhaustive solver handles at most {EXHAUSTIVE_MAX_VARS} variables, "
                      f"this model has {bqm.num_vars}; use --solver anneal", file=sys.stderr)
                return EXIT_ERROR
            bits = exhaustive_minimize(bqm).bits
        else:
            bits = simulated_anneal(bqm, params)[0].bits
    except InfeasibleError as exc:
        payload["constraints"] = [{"label": exc.group or "formation", "satisfied": False,
                                   "lhs": None, "rhs": None, "comparator": "="}]
        payload["wall_clock_s"] = time.perf_counter() - start
        payload["error"] = str(exc)
        _emit(payload, args.format)
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR

    lineup = problem.decode(bits)
    report = problem.feasibility(bits)
    payload.update(
        picks=[{"variable": p.variable, "player": p.player, "position": p.position.name,
                "rating": f"{p.rating:.2f}"} for p in lineup.picks],
        total_rating=f"{lineup.total_rating:.2f}",
        energy=format_decimal(bqm.energy(bits)),
        feasible=report.overall,
        constraints=[{"label": c.label, "satisfied": c.satisfied, "lhs": c.lhs, "rhs": c.rhs,
                      "comparator": c.comparator.value} for c in report.checks],
        wall_clock_s=time.perf_counter() - start,
    )
    _emit(payload, args.format)
    return EXIT_OK if report.overall else EXIT_INFEASIBLE


def cmd_export_bqm(args) -> int:
    try:
        text = _load_problem(args).bqm.dumps()
        if args.out == "-":
            sys.stdout.write(text)
        else:
            Path(args.out).write_text(text, encoding="utf-8")
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


def cmd_compare(args) -> int:
    try:
        found = load_lineup(args.found)
        reference = load_lineup(args.reference)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    diff = compare(found, reference)
    print(diff.render())
    return EXIT_OK if diff.identical else EXIT_DIFFERS


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"solve": cmd_solve, "export-bqm": cmd_export_bqm, "compare": cmd_compare}
    return handler[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
