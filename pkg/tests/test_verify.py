import random
from decimal import Decimal

import pytest

from conftest import LINEUP_4231, PUBLISHED_433, QPU_433
from lineup_bqm import (
    AnnealParams,
    check_feasibility,
    compare,
    decode_lineup,
    exact_lineup,
    load_lineup,
    simulated_anneal,
)
from lineup_bqm.roster import Position, bits_from_ids, data_path
from lineup_bqm.verify import parse_lineup


def test_published_433_is_feasible(problems):
    p = problems[("4-3-3", "paper")]
    report = check_feasibility(bits_from_ids(QPU_433, 43), p.equalities, p.conflicts)
    assert report.overall and len(report.checks) == 19


def test_empty_team_fails_total(problems):
    p = problems[("4-3-3", "auto")]
    report = check_feasibility((0,) * 43, p.equalities, p.conflicts)
    assert not report.overall
    first = report.checks[0]
    assert (first.label, first.satisfied, first.lhs, first.rhs) == ("11 players", False, 0, 11)


def test_salah_twice_violates_conflict(problems):
    p = problems[("4-3-3", "paper")]
    ids = [i for i in QPU_433 if i != 39] + [40]
    report = check_feasibility(bits_from_ids(ids, 43), p.equalities, p.conflicts)
    assert [c.label for c in report.violated()] == ["one position for Salah"]
    assert report.violated()[0].lhs == 2


def test_slack_bits_are_ignored(problems):
    p = problems[("4-3-3", "paper")]
    bits = bits_from_ids(QPU_433, 43) + (1,) * 9
    assert check_feasibility(bits, p.equalities, p.conflicts).overall


@pytest.mark.parametrize("ids, total", [(QPU_433, "82.67"), (LINEUP_4231, "80.04")])
def test_decode_published(index, table, ids, total):
    lineup = decode_lineup(bits_from_ids(ids, 43), index, table)
    assert len(lineup.picks) == 11
    assert lineup.total_rating == Decimal(total)
    assert lineup.variables == ids


def test_decode_all_zero(index, table):
    lineup = decode_lineup((0,) * 43, index, table)
    assert lineup.picks == () and lineup.total_rating == 0


def test_decode_rejects_set_slack_bit(index, table):
    with pytest.raises(ValueError, match="slack"):
        decode_lineup((0,) * 43 + (1,), index, table)
    assert decode_lineup((0,) * 43 + (0,), index, table).picks == ()


def test_decode_then_reencode(index, table):
    rng = random.Random(0)
    for _ in range(50):
        bits = tuple(rng.randint(0, 1) for _ in range(43))
        assert bits_from_ids(decode_lineup(bits, index, table).variables, 43) == bits


def test_compare_published_433():
    found = load_lineup(data_path("qpu_4-3-3.csv"))
    reference = load_lineup(data_path("published_4-3-3.csv"))
    diff = compare(found, reference)
    assert [(p.player, p.position) for p in diff.only_in_found] == [("Fabinho", Position.DC)]
    assert [(p.player, p.position) for p in diff.only_in_reference] == [("Gomez", Position.DC)]
    assert diff.delta == Decimal("0.20")
    assert found.total_rating == Decimal("82.67") and reference.total_rating == Decimal("82.47")
    assert not diff.identical
    assert "delta +0.20" in diff.render()


def test_compare_published_4231():
    diff = compare(load_lineup(data_path("qpu_4-2-3-1.csv")),
                   load_lineup(data_path("published_4-2-3-1.csv")))
    assert diff.identical and diff.delta == 0


def test_compare_self_is_empty(index, table):
    rng = random.Random(1)
    for _ in range(20):
        ids = sorted(rng.sample(range(1, 44), rng.randint(0, 11)))
        lineup = decode_lineup(bits_from_ids(ids, 43), index, table)
        diff = compare(lineup, lineup)
        assert diff.identical and diff.delta == 0


def test_reference_fixtures_agree_with_roster(index, table):
    for name in ["qpu_4-3-3", "published_4-3-3", "qpu_4-2-3-1", "published_4-2-3-1"]:
        lineup = load_lineup(data_path(f"{name}.csv"))
        for p in lineup.picks:
            assert index.pair(p.variable) == (p.player, p.position)
            assert table.get(p.player, p.position).hundredths == p.hundredths


def test_lineup_csv_round_trip(index, table):
    lineup = decode_lineup(bits_from_ids(PUBLISHED_433, 43), index, table)
    assert parse_lineup(lineup.to_csv()) == lineup


@pytest.mark.parametrize("text", [
    "var,player,position,rating\n",
    "variable,player,position,rating\nx,Alisson,GK,6.81\n",
    "variable,player,position,rating\n1,Alisson,XX,6.81\n",
    "variable,player,position,rating\n1,Alisson,GK\n",
])
def test_lineup_csv_errors(text):
    with pytest.raises(ValueError):
        parse_lineup(text)


def test_consistency_triangle(problems):
    """Zero penalty implies feasible; feasible admits zero penalty (auto mode)."""
    rng = random.Random(4)
    for (name, mode), p in problems.items():
        bqm = p.bqm
        outputs = [p.full_bits(exact_lineup(p.table, p.formation, p.conflicts))]
        outputs += [s.bits for s in simulated_anneal(bqm, AnnealParams(num_reads=4, sweeps_per_read=300))]
        for _ in range(30):
            outputs.append(tuple(rng.randint(0, 1) for _ in range(bqm.num_vars)))
        for bits in outputs:
            lineup = p.decode(bits)
            penalty = bqm.energy(bits) + lineup.total_rating
            report = p.feasibility(bits)
            if penalty == 0:
                assert report.overall
            if report.overall and mode == "auto":
                filled = p.full_bits(lineup)
                assert bqm.energy(filled) + lineup.total_rating == 0
