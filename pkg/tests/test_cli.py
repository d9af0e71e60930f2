import json
import os
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from lieheat.cli import run
from lieheat.parser import make_table, parse_expr

SCHEMA = json.loads(resources.files("lieheat").joinpath("schemas", "output.schema.json").read_text())

EXAMPLES = [
    (["verify", "tables123.cat"], 0, "all entries pass"),
    (["verify", "tables123.cat", "--only", "T3.*"], 0, "all entries pass: 12/12"),
    (["verify", "missing.cat"], 2, "error"),
    (["residual", "--field", "t*dx + du", "--pde", "-u*u_x + G(u_x)"], 0, "0"),
    (["residual", "--field", "dt", "--pde", "F0(x,u,u_x)"], 0, "0"),
    (["residual", "--field", "alpha(t)*dx", "--pde", "F0(t,u,u_x)"], 1, "-u_x*alpha'(t)"),
    (["commutator", "dt", "t*dt + 0.5*x*dx"], 0, "dt"),
    (["classify", "--basis", "basis_a133.txt"], 0, "A_{3.3} (sl(2,R)); Killing signature (2,1)"),
    (["transform", "--sub", "u = -ln(abs(v))", "--pde", "-u_x^2"], 0, "v_t = v_xx; factor -1/v"),
]


def first_line(text):
    return text.splitlines()[0] if text.strip() else ""


@pytest.mark.parametrize("argv, code, expected", EXAMPLES, ids=[" ".join(a[:2]) for a, _, _ in EXAMPLES])
def test_documented_examples(argv, code, expected):
    got, text = run(argv)
    assert got == code
    if argv[0] == "verify" and code == 0:
        assert text.splitlines()[-1].startswith(expected)
    elif code == 2:
        assert text.startswith(expected)
    else:
        assert first_line(text) == expected


@pytest.mark.parametrize("argv, code, _", EXAMPLES, ids=[" ".join(a[:2]) for a, _, _ in EXAMPLES])
def test_json_output_validates(argv, code, _):
    got, text = run(argv + ["--format", "json"])
    doc = json.loads(text)
    jsonschema.validate(doc, SCHEMA)
    assert got == code == doc["exit_code"]


def test_only_filters_rows():
    _, text = run(["verify", "tables123.cat", "--only", "T3.*"])
    rows = [ln for ln in text.splitlines() if ln.startswith(("PASS", "FAIL", "ERRATUM"))]
    assert len(rows) == 12 and all(" T3." in ln for ln in rows)


def test_residual_output_reparses():
    _, text = run(["residual", "--field", "alpha(t)*dx", "--pde", "F0(t,u,u_x)"])
    tb = make_table(permissive=True)
    assert parse_expr(first_line(text), tb) == parse_expr("-alpha'(t)*u_x", tb)


def test_transform_with_new_variable_and_inverse():
    code, text = run(["transform", "--sub", "v = exp(-u)", "--inverse", "u = -ln(v)", "--pde", "exp(u)"])
    assert code == 0
    assert first_line(text) == "v_t = v_xx - v_x^2/v - 1; factor -1/v"


def test_classify_relations_and_so3():
    code, text = run(["classify", "--basis", "basis_a34.txt"])
    assert code == 0 and first_line(text) == "A_{3.4} (so(3)); Killing signature (0,3)"
    code, text = run(["classify", "--relations", "[e1,e2] = e1", "--dim", "2"])
    assert code == 0 and first_line(text).startswith("A_{2.2}")


def test_controls_are_reported_as_caught():
    code, text = run(["verify", "--controls", "--only", "NC.*"])
    assert code == 0
    assert text.splitlines()[-1].startswith("all negative controls caught")


@pytest.mark.parametrize(
    "argv",
    [
        ["residual", "--field", "t*dx +", "--pde", "u"],
        ["residual", "--field", "dx", "--pde", "u", "--seed", "-1"],
        ["residual", "--field", "dx", "--pde", "u", "--seed", "abc"],
        ["classify", "--basis", "no_such_basis.txt"],
    ],
)
def test_input_errors_exit_2(argv):
    code, text = run(argv)
    assert code == 2 and text.startswith("error")
    code, text = run(argv + ["--format", "json"])
    doc = json.loads(text)
    jsonschema.validate(doc, SCHEMA)
    assert code == 2 and doc["command"] == "error"


def test_seed_environment_fallback(monkeypatch):
    monkeypatch.setenv("LIEHEAT_SEED", "not-a-number")
    assert run(["commutator", "dt", "dx"])[0] == 2
    monkeypatch.setenv("LIEHEAT_SEED", "12345")
    assert run(["commutator", "dt", "dx"]) == (0, "0\n")
    assert run(["commutator", "dt", "dx", "--seed", "7"]) == (0, "0\n")


def _cli(*argv, env=None):
    return subprocess.run(
        [sys.executable, "-m", "lieheat.cli", *argv],
        capture_output=True,
        text=True,
        env={**os.environ, **(env or {})},
    )


def test_repeated_runs_are_byte_identical():
    argv = ("verify", "tables123.cat", "--only", "T3.0*", "--format", "json", "--seed", "11")
    a, b = _cli(*argv), _cli(*argv)
    assert a.returncode == b.returncode == 0
    assert a.stdout == b.stdout and a.stdout


def test_entry_point_streams():
    bad = _cli("verify", "missing.cat")
    assert bad.returncode == 2 and bad.stdout == "" and "error" in bad.stderr
    ok = _cli("residual", "--field", "alpha(t)*dx", "--pde", "F0(t,u,u_x)")
    assert ok.returncode == 1 and ok.stdout.splitlines()[0] == "-u_x*alpha'(t)"


def test_export_text_round_trips():
    code, text = run(["export", "extended.cat", "--format", "text"])
    assert code == 0 and text.startswith("format = lieheat-catalog/1")
    code, doc = run(["export", "extended.cat", "--format", "json"])
    assert code == 0 and json.loads(doc)["document"]["format"] == "lieheat-catalog/1"
