import json
import subprocess
import sys

import pytest

from ciresolve import cli
from ciresolve.io import dumps, load_problem, parse_problem

from .helpers import INPUTS, SHIPPED


def run(capsys, *args):
    code = cli.main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, data, name="in.json"):
    path = tmp_path / name
    path.write_text(data if isinstance(data, str) else json.dumps(data))
    return str(path)


def test_ring_info_for_codimension_two(capsys):
    code, out, _ = run(capsys, "ring-info", "--input", str(INPUTS / "ci_x2_y2.json"))
    assert code == 0
    assert "regular sequence: certified to degree 30" in out
    assert "HS of Q_2: 1,2,1" in out.splitlines()


def test_ring_info_for_regular_ring(capsys):
    code, out, _ = run(capsys, "ring-info", "--input", str(INPUTS / "regular_xyz.json"), "--max-degree", "4")
    assert code == 0
    assert "codimension 0 presentation (regular ring)" in out
    assert "HS of Q_0: 1,3,6,10,15" in out


def test_classify_hypersurface(capsys):
    code, out, _ = run(capsys, "classify", "--input", str(INPUTS / "hypersurface_x3_y3.json"))
    assert code == 0
    first = out.splitlines()[0]
    assert first.startswith("hypersurface (codim 1); Betti: 1,2,2,")
    assert "periodic tail from i0" in first


def test_cone_check_passes(capsys):
    code, out, _ = run(capsys, "cone-check", "--input", str(INPUTS / "ci_x2_y2.json"), "--max-homological", "6")
    assert code == 0
    assert out.rstrip().endswith("PASS")
    assert "homology equal" in out


@pytest.mark.parametrize("command", ["resolve", "betti", "operators"])
def test_other_commands_run(capsys, command):
    code, out, _ = run(capsys, command, "--input", str(INPUTS / "hypersurface_x2.json"), "--max-homological", "6")
    assert code == 0 and out


def test_betti_json(capsys):
    code, out, _ = run(capsys, "betti", "--input", str(INPUTS / "ci_x2_y2.json"), "--format", "json", "--max-homological", "5")
    assert code == 0
    data = json.loads(out)
    assert data["N"] == 5
    assert out == dumps(data)


def test_malformed_json_exits_two(capsys, tmp_path):
    code, _, err = run(capsys, "ring-info", "--input", write(tmp_path, '{"prime": 5,\n  "variables": [}'))
    assert code == 2
    assert "line 2" in err


def test_non_homogeneous_relation_names_its_index(capsys, tmp_path):
    data = {"prime": 5, "variables": ["x", "y"], "relations": ["x^2", "x^3 + y^2"]}
    code, _, err = run(capsys, "ring-info", "--input", write(tmp_path, data))
    assert code == 2
    assert "relation 1 is not homogeneous" in err
    assert "relations[1]" in err


def test_missing_file_exits_two(capsys, tmp_path):
    code, _, _ = run(capsys, "betti", "--input", str(tmp_path / "nope.json"))
    assert code == 2


def test_not_regular_exits_three(capsys, tmp_path):
    data = {"prime": 5, "variables": ["x", "y"], "relations": ["x^2", "x*y"]}
    code, out, err = run(capsys, "classify", "--input", write(tmp_path, data), "--format", "json")
    assert code == 3
    assert json.loads(out)["error"] == "NotRegular"


def test_degree_bound_too_small_exits_four(capsys):
    # the Koszul syzygy xy of the regular-level resolution sits in degree 2
    code, _, err = run(capsys, "betti", "--input", str(INPUTS / "hypersurface_x3_y3.json"), "--max-degree", "1")
    assert code == 4
    assert "degree 1" in err


def test_bound_below_generators_exits_four(capsys, tmp_path):
    data = {"prime": 5, "variables": ["x"], "relations": ["x^2"], "module": {"generators": [3], "relations": []}}
    code, _, _ = run(capsys, "betti", "--input", write(tmp_path, data), "--max-degree", "2")
    assert code == 4


def test_short_window_exits_five(capsys):
    code, _, _ = run(capsys, "classify", "--input", str(INPUTS / "ci_x2_y2.json"), "--max-homological", "5")
    assert code == 5


def test_bad_arguments_are_rejected():
    with pytest.raises(SystemExit):
        cli.main(["betti", "--input", "x.json", "--max-homological", "0"])
    with pytest.raises(SystemExit):
        cli.main(["frobnicate", "--input", "x.json"])


@pytest.mark.parametrize("name", SHIPPED)
def test_input_round_trip(name):
    problem = load_problem(INPUTS / name)
    t = problem.tower
    rebuilt = {
        "prime": t.p,
        "variables": [{"name": n, "degree": w} for n, w in zip(t.names, t.weights)],
        "relations": [f.to_json() for f in t.relations],
        "module": problem.module.to_json(),
    }
    again = parse_problem(json.loads(dumps(rebuilt)))
    assert again.tower.relations == t.relations
    assert again.module.generators == problem.module.generators
    assert again.module.relations.entries == problem.module.relations.entries


def _cli_bytes(args):
    return subprocess.run([sys.executable, "-m", "ciresolve.cli", *args], capture_output=True, check=False).stdout


@pytest.mark.parametrize("command", ["betti", "cone-check", "operators"])
def test_output_is_byte_identical_across_runs(command):
    args = [command, "--input", str(INPUTS / "ci_x2_y2.json"), "--max-homological", "6", "--seed", "3", "--format", "json"]
    first = _cli_bytes(args)
    assert first
    assert first == _cli_bytes(args)
