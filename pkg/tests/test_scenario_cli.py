import csv
import json

import pytest

from dynring.adversary import NoRemoval
from dynring.cli import EXIT_CONFIG, EXIT_FOUND, EXIT_OK, main
from dynring.harness import ResultKind
from dynring.protocols import Protocol
from dynring.ring import Direction
from dynring.scenario import (
    Scenario,
    ScenarioError,
    load_scenario,
    parse_knows,
    parse_orientations,
    read_trace,
    save_scenario,
    scenario_from_dict,
    write_table,
    write_trace,
)
from dynring.sweep import canonical_configs, orientation_assignments, summarize, sweep


def test_parse_knows():
    assert parse_knows("n") == (True, False)
    assert parse_knows("k") == (False, True)
    assert parse_knows("nk") == (True, True)
    with pytest.raises(ScenarioError):
        parse_knows("x")


def test_parse_orientations():
    assert parse_orientations("CW,ccw") == [Direction.CW, Direction.CCW]
    assert parse_orientations([1, -1]) == [Direction.CW, Direction.CCW]
    assert parse_orientations(None) is None
    with pytest.raises(ScenarioError):
        parse_orientations("left")


def test_scenario_yaml_round_trip(tmp_path):
    sc = Scenario(7, [0, 1, 3], protocol="NoCrossNoChir", adversary="persistent:2", orientations=["CW", "CCW", "CW"])
    path = tmp_path / "s.yaml"
    save_scenario(sc, path)
    back = load_scenario(path)
    assert back == sc
    assert back.run(record_trace=False).verdict == sc.run(record_trace=False).verdict


def test_scenario_keeps_unknown_keys_and_needs_n():
    sc = scenario_from_dict({"n": 5, "homebases": [0, 2], "note": "hello"})
    assert sc.extra == {"note": "hello"} and sc.to_dict()["note"] == "hello"
    with pytest.raises(ScenarioError):
        scenario_from_dict({"homebases": [0, 1]})
    with pytest.raises(ScenarioError):
        Scenario(2, [0, 1]).topology()
    with pytest.raises(ScenarioError):
        Scenario(5, [0, 1], protocol="CrossNoChir", knows="k").protocol_id()


def test_scenario_script_overrides_adversary():
    res = Scenario(5, [0, 2], protocol="CrossChir", adversary="greedy", script=[1, None, 3]).run()
    assert res.schedule()[:3] == [1, None, 3]


def test_trace_jsonl_round_trip(tmp_path):
    res = Scenario(6, [0, 1, 3], adversary="random", seed=3).run()
    path = tmp_path / "t.jsonl"
    write_trace(res.trace, path)
    lines = path.read_text().splitlines()
    assert len(lines) == len(res.trace)
    first = json.loads(lines[0])
    assert set(first) == {"round", "missingEdge", "agents"}
    assert set(first["agents"][0]) == {"location", "state", "direction", "Ttime", "Btime", "Esteps", "BPeriods", "crossed"}
    assert read_trace(path) == res.trace


def test_write_table_unions_columns(tmp_path):
    path = tmp_path / "t.csv"
    write_table([{"a": 1}, {"a": 2, "b": 3}], path)
    rows = list(csv.DictReader(open(path)))
    assert rows == [{"a": "1", "b": ""}, {"a": "2", "b": "3"}]


def test_canonical_configs_counts():
    # binary necklaces of length 6 with 2..6 beads under rotation: 3 + 4 + 3 + 1 + 1
    assert len(canonical_configs(6)) == 12
    assert canonical_configs(4, [2]) == [(0, 1), (0, 2)]
    assert len(orientation_assignments(3, False)) == 8
    assert orientation_assignments(3, True) == [(Direction.CW,) * 3]


def test_sweep_empty_strategy_set_gives_empty_table():
    rows = sweep([Scenario(5, [0, 1]).protocol_id()], [(5, (0, 1))], strategies=lambda t: [])
    assert rows == []
    assert summarize(rows) == "no cells"


def test_sweep_rows():
    pid = Scenario(5, [0, 1]).protocol_id()
    rows = sweep([pid], [(5, (0, 1)), (6, (0, 3))], strategies=lambda t: [NoRemoval()], all_orientations=False)
    assert [r["expected"] for r in rows] == [ResultKind.GATHERED.value, ResultKind.DETECTED_UNSOLVABLE.value]
    assert all(r["margin"] == r["bound"] - r["rounds"] for r in rows)
    assert "2 cells" in summarize(rows)


def test_cli_run_ok(tmp_path, capsys):
    out = tmp_path / "trace.jsonl"
    code = main(["run", "--n", "16", "--homebases", "0,3,7,12", "--trace-out", str(out)])
    assert code == EXIT_OK
    text = capsys.readouterr().out
    assert "Gathered" in text and out.exists()


def test_cli_run_from_yaml_with_override(tmp_path, capsys):
    path = tmp_path / "s.yaml"
    save_scenario(Scenario(6, [0, 3]), path)
    assert main(["run", str(path)]) == EXIT_OK
    assert "DetectedUnsolvable" in capsys.readouterr().out
    assert main(["run", str(path), "--homebases", "0,1,3"]) == EXIT_OK
    assert "Gathered" in capsys.readouterr().out


def test_cli_run_unexpected_outcome_exits_one():
    # too few rounds to finish: TimedOut is not what the class calls for
    assert main(["run", "--n", "7", "--homebases", "0,1,3", "--max-rounds", "3"]) == EXIT_FOUND


@pytest.mark.parametrize(
    "argv",
    [
        ["run", "--n", "2", "--homebases", "0,1"],
        ["run", "--n", "5", "--homebases", "0,9"],
        ["run", "--n", "5", "--homebases", "0,1", "--knows", "k"],
        ["run", "--n", "5", "--homebases", "0,1", "--adversary", "teleport"],
        ["run", "--n", "5", "--homebases", "0,1", "--protocol", "CrossChir", "--orientations", "CW,CCW"],
        ["run"],
        ["bogus"],
        ["labels", "--n", "2"],
    ],
)
def test_cli_configuration_errors_exit_two(argv, capsys):
    assert main(argv) == EXIT_CONFIG


def test_cli_classify(capsys):
    assert main(["classify", "--n", "16", "--homebases", "0,3,7,12"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "<3,4,5,4>" in out and "EdgeEdge" in out


def test_cli_labels(tmp_path, capsys):
    path = tmp_path / "labels.csv"
    assert main(["labels", "--n", "5", "--out", str(path)]) == EXIT_OK
    rows = list(csv.DictReader(open(path)))
    assert len(rows) == 5 and rows[0].keys() == {"edge", "S", "X", "Y"}


def test_cli_check(capsys):
    assert main(["check", "--n", "3", "--homebases", "0,1"]) == EXIT_OK
    assert "AllSchedulesGather" in capsys.readouterr().out
    assert main(["check", "--n", "5", "--homebases", "0,1,2", "--budget", "20"]) == EXIT_FOUND
    assert "BudgetExceeded" in capsys.readouterr().out


def test_cli_sweep(tmp_path, capsys):
    path = tmp_path / "sweep.csv"
    code = main(["sweep", "--n", "4", "--protocol", "CrossChir", "--adversary", "none;greedy", "--out", str(path)])
    assert code == EXIT_OK
    rows = list(csv.DictReader(open(path)))
    assert len(rows) == 2 * len(canonical_configs(4))
    assert Protocol.CROSS_CHIR.value in rows[0]["protocol"]


def test_cli_sweep_empty_strategy_set(capsys):
    assert main(["sweep", "--n", "4", "--adversary", ""]) == EXIT_OK
    assert "no cells" in capsys.readouterr().out
