import json
from pathlib import Path

import pytest

from jambeam.cli import main

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"


def test_simulate_writes_trace_and_shape(tmp_path, capsys):
    trace = tmp_path / "trace.ndjson"
    shape = tmp_path / "shape.csv"
    code = main(["simulate", str(SCENARIOS / "fig5_sequential_buckling.json"),
                 "--trace", str(trace), "--shapes", str(shape)])
    assert code == 0
    lines = trace.read_text().strip().split("\n")
    kinds = {json.loads(l)["kind"] for l in lines}
    assert kinds == {"snapshot", "action", "event", "buckle"}
    assert shape.read_text().startswith("x_m,y_m\n")
    out = capsys.readouterr().out
    assert "ran 9 actions" in out


def test_simulate_rejects_bad_scenario(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"spec": {"num_pouches": 0}}))
    assert main(["simulate", str(bad)]) == 2
    assert "spec.num_pouches" in capsys.readouterr().err


def test_experiment_deflection_csv(tmp_path):
    out = tmp_path / "sweep.csv"
    code = main(["experiment", "deflection", "--csv", str(out)])
    assert code == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "pressure_pa,state,tip_deflection_m,buckled,buckle_x_m"
    assert len(lines) == 8  # header + 7 standard pressures
    buckled = [l.split(",")[3] for l in lines[1:]]
    assert buckled == ["true", "true", "false", "false", "false", "false", "false"]


def test_experiment_jammed_flag(tmp_path):
    out = tmp_path / "sweep.csv"
    main(["experiment", "deflection", "--jammed", "--csv", str(out)])
    rows = out.read_text().strip().split("\n")[1:]
    assert all(r.split(",")[1] == "jammed" for r in rows)
    assert all(r.split(",")[3] == "false" for r in rows)


def test_experiment_custom_pressures(tmp_path):
    out = tmp_path / "sweep.csv"
    main(["experiment", "deflection", "--pressures", "7000:9000:1000",
          "--csv", str(out)])
    rows = out.read_text().strip().split("\n")[1:]
    assert [r.split(",")[0] for r in rows] == ["7000.0", "8000.0", "9000.0"]


def test_plan_corner_goal(tmp_path, capsys):
    goal = tmp_path / "goal.csv"
    goal.write_text("x_m,y_m\n0,0\n0.45,0\n0.45,0.15\n")
    script_out = tmp_path / "script.json"
    scenario = tmp_path / "spec.json"
    scenario.write_text(json.dumps({"spec": {"length_m": 0.6, "num_pouches": 4}}))
    code = main(["plan", str(goal), "--script-out", str(script_out),
                 "--scenario", str(scenario)])
    assert code == 0
    doc = json.loads(script_out.read_text())
    assert [a["action"] for a in doc["script"]] == \
        ["unjam_pouch", "pull_cable", "jam_pouch"]
    assert "residual" in capsys.readouterr().err
