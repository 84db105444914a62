import json
import random
from decimal import Decimal

import pytest

from conftest import LINEUP_4231, QPU_433, random_roster
from lineup_bqm import Bqm, exact_lineup
from lineup_bqm.cli import main
from lineup_bqm.roster import data_path


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write_roster(path, table):
    lines = ["player,position,rating"]
    lines += [f"{e.player},{e.position.name},{e.rating:.2f}" for e in table]
    path.write_text("\n".join(lines) + "\n")
    return str(path)


def write_formation(path, spec):
    path.write_text(json.dumps(spec.to_dict()))
    return str(path)


def test_solve_exact_433(capsys):
    code, out, _ = run(capsys, "solve", "--formation", "4-3-3", "--solver", "exact")
    assert code == 0
    lines = out.splitlines()
    assert "Max H_Z 82.67" in lines
    assert "energy -82.67" in lines
    assert "constraints: feasible" in lines
    assert lines[-1].startswith("time ")
    assert any(line.startswith("x_7") and "Fabinho" in line for line in lines)


def test_solve_json(capsys):
    code, out, _ = run(capsys, "solve", "--formation", "4-2-3-1", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["total_rating"] == "80.04"
    assert tuple(p["variable"] for p in payload["picks"]) == LINEUP_4231
    assert payload["feasible"] and payload["energy"] == "-80.04"
    assert payload["lambda"] == "90.5"


def test_solve_paper_conflicts(capsys):
    code, out, _ = run(capsys, "solve", "--conflicts", "paper", "--format", "json")
    payload = json.loads(out)
    assert code == 0
    assert tuple(p["variable"] for p in payload["picks"]) == QPU_433


def test_solve_anneal_4231_seed_1(capsys):
    """Default annealer on the 4-2-3-1 instance, seed 1."""
    code, out, _ = run(capsys, "solve", "--formation", "4-2-3-1", "--solver", "anneal",
                       "--seed", "1", "--format", "json")
    payload = json.loads(out)
    assert payload["feasible"]
    assert payload["total_rating"] == "80.04"


def test_solve_without_goalkeeper_is_infeasible(capsys, tmp_path):
    roster = tmp_path / "r.csv"
    with open(data_path("figure1.csv"), encoding="utf-8") as fh:
        roster.write_text("".join(line for line in fh if ",GK," not in line))
    code, out, err = run(capsys, "solve", "--roster", str(roster), "--format", "json")
    assert code == 2
    payload = json.loads(out)
    assert payload["constraints"][0]["label"] == "1 goalkeeper"
    assert not payload["feasible"]
    assert "infeasible" in err


def test_export_bqm_paper(capsys, tmp_path):
    out_path = tmp_path / "h.txt"
    assert run(capsys, "export-bqm", "--conflicts", "paper", "--out", str(out_path))[0] == 0
    text = out_path.read_text()
    assert text.splitlines()[0] == "offset 13575"
    assert Bqm.loads(text).num_vars == 52

    code, again, _ = run(capsys, "export-bqm", "--conflicts", "paper", "--out", "-")
    assert code == 0 and again == text


def test_export_bqm_bad_lambda(capsys):
    code, _, err = run(capsys, "export-bqm", "--lambda", "0", "--out", "-")
    assert code == 1 and "positive" in err


def test_exhaustive_refuses_paper_instance(capsys):
    code, _, err = run(capsys, "solve", "--solver", "exhaustive")
    assert code == 1 and "anneal" in err


def test_bad_roster_path(capsys, tmp_path):
    code, _, err = run(capsys, "solve", "--roster", str(tmp_path / "missing.csv"))
    assert code == 1 and err.startswith("error:")


def test_compare_fixtures(capsys):
    code, out, _ = run(capsys, "compare", str(data_path("qpu_4-3-3.csv")),
                       str(data_path("published_4-3-3.csv")))
    assert code == 3
    assert out.splitlines() == ["+ x_7 Fabinho DC 7.11", "- x_4 Gomez DC 6.91", "delta +0.20"]

    code, out, _ = run(capsys, "compare", str(data_path("qpu_4-2-3-1.csv")),
                       str(data_path("published_4-2-3-1.csv")))
    assert code == 0 and out.splitlines() == ["line-ups identical (delta 0.00)"]


def test_compare_parse_error(capsys, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("nope\n")
    code, _, err = run(capsys, "compare", str(bad), str(data_path("qpu_4-3-3.csv")))
    assert code == 1 and "error" in err


def test_solve_is_deterministic(capsys):
    argv = ("solve", "--solver", "anneal", "--reads", "4", "--sweeps", "200", "--seed", "5")
    first = run(capsys, *argv)[1].splitlines()[:-1]
    second = run(capsys, *argv)[1].splitlines()[:-1]
    assert first == second


@pytest.mark.parametrize("seed", range(6))
def test_solvers_agree_on_toy_rosters(capsys, tmp_path, seed):
    rng = random.Random(seed)
    table, spec = random_roster(rng, max_players=8, max_vars=16)
    roster = write_roster(tmp_path / "r.csv", table)
    formation = write_formation(tmp_path / "f.json", spec)
    totals = set()
    for solver in ["exact", "exhaustive", "anneal"]:
        code, out, _ = run(capsys, "solve", "--roster", roster, "--formation", formation,
                           "--solver", solver, "--format", "json")
        payload = json.loads(out)
        assert code == 0 and payload["feasible"]
        assert Decimal(payload["energy"]) == -Decimal(payload["total_rating"])
        totals.add(payload["total_rating"])
    assert totals == {f"{exact_lineup(table, spec).total_rating:.2f}"}
