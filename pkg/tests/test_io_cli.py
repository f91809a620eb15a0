import json
import math
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from klainval import HIntegralTerm, IntrinsicTerm, MixedVolumeTerm, ParseError, ValuationSpec, cube, evaluate, octahedron
from klainval import io
from klainval.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(allow_nan=False, allow_infinity=False, width=64), min_size=1, max_size=8))
def test_json_floats_roundtrip_exactly(xs):
    assert io.loads(io.dumps({"x": xs}))["x"] == xs


def test_spec_roundtrip():
    phi = ValuationSpec(
        3,
        [
            MixedVolumeTerm(1, [cube(3), octahedron()], 0.5),
            HIntegralTerm.symmetrized([[1.0, 0, 0]], [0.25]),
            IntrinsicTerm(1, 2.0, 3),
        ],
    )
    back = io.spec_from_json(io.loads(io.dumps(io.spec_to_json(phi))))
    for K in (cube(3), octahedron()):
        assert evaluate(back, K) == evaluate(phi, K)


def test_parse_errors_name_the_problem(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 3,\n "vertices": [[0, 0]')
    with pytest.raises(ParseError, match="line 2"):
        io.load_json(str(bad))
    with pytest.raises(ParseError, match="vertices"):
        io.polytope_from_json({"n": 3})
    with pytest.raises(ParseError, match="length n=3"):
        io.polytope_from_json({"n": 3, "vertices": [[0, 0]]})
    with pytest.raises(ParseError, match="unknown term kind"):
        io.spec_from_json({"n": 3, "terms": [{"kind": "nope"}]})
    with pytest.raises(ParseError, match="pairs"):
        io.spec_from_json({"n": 3, "terms": [{"kind": "hintegral", "atoms": [[[1, 0, 0], 1.0]]}]})


def test_bundled_references():
    assert io.load_polytope("cube").dim_volume() == pytest.approx(1.0)
    assert io.load_polytope("zonotope3.json").n == 3
    assert io.load_subspace("e1.json").dim == 1
    assert io.load_spec("v1.json").degree == 1


def test_csv_text():
    assert io.csv_text(["a", "b"], [(1, 0.1 + 0.2)]) == "a,b\n1,0.3\n"


def test_cli_volume_and_formats(capsys, tmp_path):
    code, out, _ = run(["volume", "--body", "octahedron"], capsys)
    assert code == 0 and json.loads(out)["volume"] == pytest.approx(4 / 3)
    code, out, _ = run(["intrinsic", "--body", "cube", "--format", "csv"], capsys)
    assert code == 0 and out.splitlines()[0] == "i,value" and out.splitlines()[2] == "1,3"
    target = tmp_path / "faces.json"
    code, out, _ = run(["faces", "--body", "cube", "--out", str(target)], capsys)
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["counts"] == [8, 12, 6]


def test_cli_mixed_pads_with_last_body(capsys):
    code, out, _ = run(["mixed", "--body", "cube", "--body", "ball3"], capsys)
    assert code == 0 and json.loads(out)["mixed_volume"] == pytest.approx(math.pi, rel=0.02)


def test_cli_klain_and_decompose(capsys):
    code, out, _ = run(["klain", "--spec", "vcc.json", "--subspace", "e1.json"], capsys)
    assert code == 0 and json.loads(out)["klain"] == pytest.approx(1 / 3)
    code, out, _ = run(["decompose", "--spec", "v1.json", "--body", "cube"], capsys)
    assert np.allclose(json.loads(out)["components"], [0, 3, 0, 0], atol=1e-9)


def test_cli_membership_exit_codes(capsys):
    code, out, _ = run(["membership", "--body", "cube", "--i", "1"], capsys)
    assert code == 0 and json.loads(out)["verdict"] == "member"
    code, out, _ = run(["membership", "--body", "octahedron", "--i", "1"], capsys)
    assert code == 2 and len(json.loads(out)["violating_faces"]) == 8


def test_cli_witness(capsys):
    code, out, _ = run(["witness", "--body", "octahedron"], capsys)
    d = json.loads(out)
    assert code == 0 and d["found"] and d["value_at_body"] < 0 and d["audit_min_shifted"] > 0
    code, out, _ = run(["witness", "--body", "zonotope3"], capsys)
    assert code == 2 and not json.loads(out)["found"]


def test_cli_seeded_commands_are_deterministic(capsys):
    argv = ["radon", "--spec", "vcc.json", "--subspace", "e12.json", "--samples", "500", "--seed", "4"]
    _, a, _ = run(argv, capsys)
    _, b, _ = run(argv, capsys)
    assert a == b and json.loads(a)["seed"] == 4
    _, c, _ = run(argv[:-1] + ["5"], capsys)
    assert c != a


def test_cli_adjointcheck(capsys):
    code, out, _ = run(["adjointcheck", "--n", "4", "--i", "1", "--j", "2", "--samples", "20000"], capsys)
    assert code == 0 and json.loads(out)["passed"]


def test_cli_errors(capsys, tmp_path):
    code, _, err = run(["volume", "--body", "no-such-body"], capsys)
    assert code == 1 and "cannot resolve" in err
    code, _, err = run(["klain", "--spec", "v1.json"], capsys)
    assert code == 1 and "--subspace" in err
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    code, _, err = run(["volume", "--body", str(bad)], capsys)
    assert code == 1 and "line 1" in err


def test_console_script_entry_point():
    res = subprocess.run([sys.executable, "-m", "klainval.cli", "volume", "--body", "cube"], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["volume"] == 1


def test_cli_radii_csv(capsys):
    code, out, _ = run(["radii", "--body", "cube", "--samples", "300", "--format", "csv"], capsys)
    rows = out.splitlines()
    assert code == 0 and rows[0] == "i,R_upper,r_lower,samples,seed" and len(rows) == 4
