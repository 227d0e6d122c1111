import json
import random
import subprocess
import sys

import pytest

from thickcalc import cli, oracle
from thickcalc.calculus import Expansion
from thickcalc.instances import pullback_instance, random_polynomial
from thickcalc.series import PolynomialFunction


def run(capsys, *argv):
    code = cli.main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


@pytest.fixture
def files(tmp_path):
    S, g = pullback_instance(3, max_dim=2)
    s_path, g_path = tmp_path / "S.json", tmp_path / "g.json"
    s_path.write_text(json.dumps(S.to_json()))
    g_path.write_text(json.dumps(g.to_json()))
    return tmp_path, str(s_path), str(g_path), S


def test_enumerate_two_whites(capsys):
    code, out, _ = run(capsys, "enumerate", "--white", "2", "--loops", "0")
    assert code == 0
    assert out.splitlines() == ["•  loops=0  |sym|=1", "○  loops=0  |sym|=1",
                                "○–•–○  loops=0  |sym|=2"]


def test_enumerate_json(capsys):
    code, out, _ = run(capsys, "enumerate", "--white", "3", "--loops", "1", "--format", "json")
    assert code == 0
    assert len(json.loads(out)) == 18


def test_enumerate_ordered(capsys):
    code, out, _ = run(capsys, "enumerate", "--white", "1", "--loops", "1", "--ordered")
    assert code == 0
    assert out.splitlines()[-1].endswith("slots=[[0, 0]]")


def test_symbolic_pullback(capsys):
    code, out, _ = run(capsys, "pullback", "--classical", "--g-order", "2")
    assert code == 0
    assert out.strip() == "S^0 + g(\\varphi) + S^{ab} \\partial_ag(\\varphi) \\partial_bg(\\varphi)"


def test_numeric_pullback_json_round_trip(capsys, files):
    _, s, g, _ = files
    code, out, _ = run(capsys, "pullback", s, g, "--quantum", "--g-order", "2",
                       "--hbar-order", "1", "--format", "json")
    assert code == 0
    obj = json.loads(out)
    exp = Expansion.from_json(obj)
    assert exp.to_json() == {k: v for k, v in obj.items() if k != "total"}
    assert exp.total().to_json() == obj["total"]
    # the classical pullback on real input still has the three-term shape
    code, out, _ = run(capsys, "pullback", s, g, "--classical", "--g-order", "2")
    assert out.splitlines()[0] == (
        "S^0 + g(\\varphi) + S^{ab} \\partial_ag(\\varphi) \\partial_bg(\\varphi)")
    assert out.splitlines()[1].startswith("% value: ")


def test_verify_quantum(capsys):
    code, out, _ = run(capsys, "verify", "--quantum", "--g-order", "3", "--hbar-order", "1",
                       "--trials", "20", "--seed", "7")
    assert code == 0
    assert out.splitlines()[-1] == "all trials agree"
    assert len(out.splitlines()) == 21


@pytest.mark.parametrize("mode", ["--classical", "--super"])
def test_verify_other_modes(capsys, mode):
    code, _, _ = run(capsys, "verify", mode, "--g-order", "3", "--trials", "3", "--seed", "1")
    assert code == 0


def test_verify_mismatch_reports_first_term(capsys, files, monkeypatch):
    _, s, g, _ = files
    real = oracle.general_R
    monkeypatch.setattr(oracle, "general_R", lambda *a: real(*a) + 1)
    code, _, err = run(capsys, "verify", s, g, "--g-order", "2")
    assert code == 4
    assert "first differing term" in err


def test_parse_error(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "pullback", str(bad), str(bad))
    assert code == 2 and err.startswith("error:")


def test_missing_inputs(capsys):
    code, _, _ = run(capsys, "sign")
    assert code == 2


def test_negative_order(capsys):
    code, _, _ = run(capsys, "pullback", "--g-order", "-1")
    assert code == 2


def test_dimension_mismatch(capsys, files):
    tmp, s, _, S = files
    other = tmp / "g3.json"
    other.write_text(json.dumps(random_polynomial(random.Random(0), S.dim + 1, 2).to_json()))
    code, _, err = run(capsys, "pullback", s, str(other))
    assert code == 3 and "dimension" in err


def test_compose_and_transform(capsys, tmp_path):
    from thickcalc.instances import random_generating_function
    rng = random.Random(2)
    F = random_generating_function(rng, 1, 2)
    G = random_generating_function(rng, 1, 2, base_dim=1)
    (tmp_path / "F.json").write_text(json.dumps(F.to_json()))
    (tmp_path / "G.json").write_text(json.dumps(G.to_json()))
    code, out, _ = run(capsys, "compose", str(tmp_path / "F.json"), str(tmp_path / "G.json"),
                       "--g-order", "2", "--format", "json")
    assert code == 0 and json.loads(out)["dim"] == 1
    change = {"y_inverse": [PolynomialFunction(1, {(1,): 1, (0,): 2}).to_json()],
              "y_map": [PolynomialFunction(1, {(1,): 1, (0,): -2}).to_json()]}
    (tmp_path / "c.json").write_text(json.dumps(change))
    code, _, _ = run(capsys, "transform", str(tmp_path / "F.json"), str(tmp_path / "c.json"),
                     "--g-order", "2")
    assert code == 0
    change["y_map"] = [PolynomialFunction(1, {(1,): 3}).to_json()]
    (tmp_path / "c.json").write_text(json.dumps(change))
    code, _, err = run(capsys, "transform", str(tmp_path / "F.json"), str(tmp_path / "c.json"),
                       "--g-order", "2")
    assert code == 1 and "identity" in err


def test_sign(capsys, tmp_path):
    from thickcalc.graphs import OrderedGraph
    obj = OrderedGraph.from_slots(2, 2, [(1, 0), (0, 1)]).to_json()
    obj["parities"] = [[1, 1], [0, 1]]
    (tmp_path / "o.json").write_text(json.dumps(obj))
    code, out, _ = run(capsys, "sign", str(tmp_path / "o.json"), "--format", "json")
    result = json.loads(out)
    assert code == 0
    assert result["crossings"] == [[0, 1], [0, 2]]
    assert result["sign"] == result["partition_sign"] == -1


def test_deterministic_output(files):
    _, s, g, _ = files
    cmd = [sys.executable, "-m", "thickcalc", "pullback", s, g, "--quantum", "--g-order", "3",
           "--format", "json"]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == second and first
