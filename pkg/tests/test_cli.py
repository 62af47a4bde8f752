import json
import subprocess
import sys

import pytest

from isomix import zoo
from isomix.chain_core import save_chain
from isomix.cli import main


def run(capsys, *argv):
    status = main(list(argv))
    out = capsys.readouterr()
    return status, out.out, out.err


def test_zoo_lists_schema(capsys):
    status, out, _ = run(capsys, "zoo")
    assert status == 0
    assert "complete_graph" in json.loads(out)


def test_zoo_export_roundtrip(capsys, tmp_path):
    path = tmp_path / "k5.json"
    status, out, _ = run(capsys, "zoo", "--zoo", "complete_graph", "5", "--out", str(path))
    assert status == 0 and "5-state" in out
    status, out, _ = run(capsys, "mixing", "--chain", str(path))
    assert status == 0 and json.loads(out)["spectral"]["lambda"] == pytest.approx(0.5)


def test_analyze_complete_graph(capsys):
    status, out, _ = run(capsys, "analyze", "--zoo", "complete_graph", "4", "--set", "0,1")
    assert status == 0
    data = json.loads(out)
    assert data["spread"]["psi_plus"] == 0.125
    assert data["sandwich"]["plus"]["upper"] == pytest.approx(0.125)


def test_analyze_csv_and_reversed(capsys, triangle, tmp_path):
    path = tmp_path / "tri.json"
    save_chain(triangle, path)
    status, out, _ = run(capsys, "analyze", "--chain", str(path), "--set", "0", "--reversed", "--format", "csv")
    assert status == 0
    assert out.splitlines()[0] == "quantity,value"


def test_profile_csv(capsys):
    status, out, _ = run(capsys, "profile", "--zoo", "complete_graph", "4", "--quantity", "psi_plus")
    assert status == 0
    assert out.splitlines() == ["x,value", "0.25,0.1875", "0.5,0.125"]


def test_profile_json_reversed(capsys):
    status, out, _ = run(capsys, "profile", "--zoo", "biased_cycle", "3", "0.4", "--quantity", "psi_plus",
                         "--reversed", "--format", "json")
    assert status == 0 and json.loads(out)["quantity"] == "rev_psi_plus"


def test_profile_non_stochastic_input(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"n": 3, "P": [[0.5, 0.5, 0], [0.2, 0.2, 0.2], [0, 0, 1]]}))
    status, _, err = run(capsys, "profile", "--chain", str(path))
    assert status == 2 and "NotStochastic" in err


@pytest.mark.parametrize("argv", [
    ["analyze", "--zoo", "complete_graph", "4"],
    ["analyze", "--zoo", "complete_graph", "4", "--set", "0,9"],
    ["analyze", "--zoo", "complete_graph", "4", "--set", "a,b"],
    ["profile", "--zoo", "complete_graph", "4", "--quantity", "psi_weird"],
    ["profile"],
    ["profile", "--zoo", "unicorn", "3"],
    ["mixing", "--chain", "/nonexistent/chain.json"],
    ["verify", "--zoo", "complete_graph", "23"],
])
def test_input_errors_exit_2(capsys, argv):
    status, _, err = run(capsys, *argv)
    assert status == 2 and err.startswith("error:")


def test_bad_epsilon_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["mixing", "--zoo", "complete_graph", "4", "--epsilon", "1.5"])
    assert exc.value.code == 2


def test_verify_complete_graph(capsys):
    status, out, _ = run(capsys, "verify", "--zoo", "complete_graph", "4")
    assert status == 0
    assert json.loads(out)["violations"] == []


def test_verify_failure_exit_status(capsys, monkeypatch):
    import isomix.cli as cli
    from isomix.verify import Violation, VerifyReport

    def broken(*args, **kwargs):
        return VerifyReport(4, 10, ["fake"], [], [Violation("fake", 1, 0.0, 1.0)])

    monkeypatch.setattr(cli, "verify_chain", broken)
    status, _, _ = run(capsys, "verify", "--zoo", "complete_graph", "4")
    assert status == 1


def test_bounds_report(capsys):
    status, out, _ = run(capsys, "bounds", "--zoo", "lazy_path", "4", "--epsilon", "0.125")
    data = json.loads(out)
    assert status == 0 and data["epsilon"] == 0.125
    assert all(v >= data["tau_exact"] for k, v in data["bounds"].items() if k.startswith("blocking"))


def test_output_is_deterministic_across_threads(capsys):
    outs = []
    for threads in ("1", "3"):
        status, out, _ = run(capsys, "verify", "--zoo", "random_lazy", "10", "4", "--threads", threads)
        outs.append(out)
    assert outs[0] == outs[1]


def test_max_states_override(capsys):
    status, out, _ = run(capsys, "profile", "--zoo", "complete_graph", "4", "--max-states", "3")
    assert status == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "isomix", "analyze", "--zoo", "complete_graph", "4", "--set", "0"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout)["spread"]["psi_plus"] == pytest.approx(3 / 16)
