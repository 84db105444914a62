import random

import pytest

from lineup_bqm import FormationSpec, LineupProblem, build_variable_index, load_formation, paper_roster
from lineup_bqm.roster import Position, Rating, RatingTable

# Variable ids of the line-ups in the published comparison tables.
QPU_433 = (1, 6, 7, 8, 11, 18, 21, 28, 34, 37, 39)
PUBLISHED_433 = (1, 4, 6, 8, 11, 18, 21, 28, 34, 37, 39)
LINEUP_4231 = (1, 6, 7, 8, 11, 14, 16, 29, 31, 32, 42)


@pytest.fixture(scope="session")
def table():
    return paper_roster()


@pytest.fixture(scope="session")
def index(table):
    return build_variable_index(table)


@pytest.fixture(scope="session")
def f433():
    return load_formation("4-3-3")


@pytest.fixture(scope="session")
def f4231():
    return load_formation("4-2-3-1")


@pytest.fixture(scope="session")
def problems(table, f433, f4231):
    return {
        (name, mode): LineupProblem(table, spec, mode)
        for name, spec in [("4-3-3", f433), ("4-2-3-1", f4231)]
        for mode in ("auto", "paper")
    }


def random_roster(rng: random.Random, max_players=12, max_vars=20, max_positions=4):
    """Small random roster plus a formation whose quotas fit the candidate counts."""
    while True:
        positions = sorted(rng.sample(list(Position), rng.randint(1, max_positions)))
        n_players = rng.randint(2, max_players)
        entries = []
        for k in range(n_players):
            for pos in rng.sample(positions, rng.randint(1, min(2, len(positions)))):
                entries.append(Rating(f"p{k}", pos, rng.randint(100, 999)))
        table = RatingTable(tuple(entries))
        quotas = {}
        for pos in positions:
            count = sum(1 for e in entries if e.position == pos)
            quotas[pos] = rng.randint(0, min(count, 3))
        if sum(quotas.values()) == 0:
            continue
        idx = build_variable_index(table)
        multi = sum(1 for p in idx.players if len(idx.ids_for_player(p)) > 1)
        if idx.n + multi <= max_vars:
            spec = FormationSpec("toy", {p.name: q for p, q in quotas.items()},
                                 sum(quotas.values()))
            return table, spec


# -- acceptance report -------------------------------------------------------

_ACCEPTANCE = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if item.module.__name__.endswith("test_acceptance") and report.when == "call":
        doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
        _ACCEPTANCE.append((doc, "PASS" if report.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for doc, status in _ACCEPTANCE:
        terminalreporter.write_line(f"{status}  {doc}")
