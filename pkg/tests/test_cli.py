import json
import subprocess
import sys

import pytest

from coordgames.cli import (
    EXIT_BUDGET,
    EXIT_INVALID,
    EXIT_INVALID_TRACE,
    EXIT_NO_EQUILIBRIUM,
    EXIT_NOT_GUARANTEED,
    EXIT_OK,
    RunConfig,
    main,
)
from coordgames.io import ParseError


def test_classify_report(tmp_path):
    out = tmp_path / "r.json"
    assert main(["classify", "fig2", "--report-out", str(out)]) == EXIT_OK
    rep = json.loads(out.read_text())
    assert rep["class"] == "partition_cycle" and rep["top"] == ["1", "2", "3", "4", "5"]


def test_solve_fig2(tmp_path, capsys):
    trace = tmp_path / "t.json"
    assert main(["solve", "fig2", "--init", "random", "--seed", "4", "--trace-out", str(trace)]) == EXIT_OK
    assert "verdict: nash" in capsys.readouterr().out
    assert main(["verify", "fig2", str(trace)]) == EXIT_OK


def test_solve_not_guaranteed_and_fallback():
    assert main(["solve", "ex2"]) == EXIT_NOT_GUARANTEED
    assert main(["solve", "ex2", "--fallback-oracle"]) == EXIT_NO_EQUILIBRIUM


def test_fallback_finds_path_on_other_graph(tmp_path):
    game, trace = tmp_path / "g.json", tmp_path / "t.json"
    assert main(["gen", "other", "--seed", "1", "-o", str(game)]) == EXIT_OK
    assert main(["solve", str(game), "--fallback-oracle", "--trace-out", str(trace)]) == EXIT_OK
    assert main(["verify", str(game), str(trace)]) == EXIT_OK
    assert main(["solve", "fig1", "--fallback-oracle"]) == EXIT_NO_EQUILIBRIUM


def test_oracle_report(tmp_path):
    out = tmp_path / "o.json"
    assert main(["oracle", "fig4-frozen", "--mode", "full", "--report-out", str(out)]) == EXIT_NO_EQUILIBRIUM
    rep = json.loads(out.read_text())
    assert rep["initial_reaches_nash"] is False
    assert rep["initial_c_reaches_nash"] is False


def test_oracle_no_equilibrium():
    assert main(["oracle", "ex6"]) == EXIT_NO_EQUILIBRIUM


def test_oracle_size_limit():
    assert main(["oracle", "fig4", "--mode", "full", "--budget", "100"]) == EXIT_BUDGET


def test_simulate_without_equilibrium_hits_budget():
    assert main(["simulate", "ex2", "--budget", "30"]) == EXIT_BUDGET


def test_csolve_cycle(tmp_path):
    game = tmp_path / "g.json"
    assert main(["gen", "cycle-unweighted", "--seed", "3", "-o", str(game)]) == EXIT_OK
    trace = tmp_path / "t.json"
    assert main(["csolve", str(game), "--trace-out", str(trace)]) == EXIT_OK
    assert json.loads(trace.read_text())["verdict"] == "strong"
    assert main(["verify", str(game), str(trace)]) == EXIT_OK


def test_tampered_trace_fails(tmp_path):
    trace = tmp_path / "t.json"
    main(["solve", "fig2", "--init", "lowest", "--trace-out", str(trace)])
    doc = json.loads(trace.read_text())
    if not doc["steps"]:
        pytest.skip("lowest start is already an equilibrium")
    doc["steps"][0]["after"] = [99]
    trace.write_text(json.dumps(doc))
    assert main(["verify", "fig2", str(trace)]) == EXIT_INVALID_TRACE


def test_explicit_initial_strategy(capsys):
    assert main(["-v", "solve", "fig2", "--init", "b,b,b,c,a,a,a,b"]) == EXIT_OK
    assert "final:" in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv",
    [
        ["solve", "no-such-fixture"],
        ["solve", "fig2", "--init", "z,z"],
        ["gen", "tree"],
        ["frobnicate"],
        ["solve", "fig2", "--seed", "-1"],
    ],
)
def test_invalid_input(argv):
    assert main(argv) == EXIT_INVALID


def test_malformed_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"nodes": 2}')
    assert main(["classify", str(bad)]) == EXIT_INVALID


def test_seed_range():
    with pytest.raises(ParseError):
        RunConfig("solve", seed=2**64)


def test_dot(tmp_path):
    out = tmp_path / "g.dot"
    assert main(["dot", "fig1", "-o", str(out)]) == EXIT_OK
    assert out.read_text().startswith("digraph")


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "coordgames.cli", "classify", "ex2"],
                         capture_output=True, text=True)
    assert res.returncode == EXIT_OK
    assert json.loads(res.stdout)["class"] == "simple_cycle"
