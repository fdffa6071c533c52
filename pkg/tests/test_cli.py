import json
import subprocess
import sys

import pytest

from jointmaxwell.cli import ANCHORS, SCHEMA, InputError, main, solution_from_spec, solution_to_spec
from jointmaxwell.solutions import polynomial_solutions


def run(args, capsys):
    code = main(args)
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
    return str(p)


WAVE = {"schema": "jointmaxwell.solution/1", "type": "plane_wave", "k": [1, 1, 0, 0], "a": [0, 0, 1, 0]}


# ---- verify-solution

def test_verify_plane_wave(tmp_path, capsys):
    code, out, _ = run(["verify-solution", "--spec", write(tmp_path, "w.json", WAVE)], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["exit_code"] == 0 and rep["schema"] == SCHEMA
    assert all(r["pass"] and "max" in r for r in rep["rows"])
    assert {r["anchor"] for r in rep["rows"]} <= set(ANCHORS.values())


def test_verify_polynomial_is_exact(tmp_path, capsys):
    spec = write(tmp_path, "p.json", {"type": "polynomial", "degree": 1, "index": 4})
    code, out, _ = run(["verify-solution", "--spec", spec], capsys)
    rep = json.loads(out)
    assert code == 0 and all(r["exact_zero"] for r in rep["rows"])


def test_non_null_wave_is_input_error(tmp_path, capsys):
    spec = write(tmp_path, "bad.json", dict(WAVE, k=[1, 2, 0, 0]))
    code, out, err = run(["verify-solution", "--spec", spec], capsys)
    assert code == 2 and out == "" and "null" in err


def test_corrupted_potential_fails_verification(tmp_path, capsys):
    d = solution_to_spec(polynomial_solutions(1)[2])
    d["A"] = [f"2*({p})" for p in d["A"]]
    code, out, _ = run(["verify-solution", "--spec", write(tmp_path, "c.json", d)], capsys)
    rep = json.loads(out)
    assert code == 1
    assert "F = DA" in rep["summary"]["failed"]


@pytest.mark.parametrize("content", ["{not json", json.dumps({"type": "mystery"}), json.dumps([1, 2]),
                                     json.dumps({"type": "polynomial", "degree": 1, "index": 99}),
                                     json.dumps({"type": "custom", "F": {}, "A": ["x0 +"], "Aprime": []}),
                                     json.dumps({"type": "plane_wave", "k": [1, 1, 0, 0]})])
def test_malformed_specs(tmp_path, capsys, content):
    code, _, err = run(["verify-solution", "--spec", write(tmp_path, "m.json", content)], capsys)
    assert code == 2 and err.startswith("error:")


def test_missing_spec_and_bad_flags(tmp_path, capsys):
    assert run(["verify-solution"], capsys)[0] == 2
    assert run(["verify-solution", "--spec", str(tmp_path / "nope.json")], capsys)[0] == 2
    assert run(["sweep", "--backend", "complex"], capsys)[0] == 2
    assert run(["frobnicate"], capsys)[0] == 2
    assert run([], capsys)[0] == 2


def test_custom_spec_roundtrip():
    sol = polynomial_solutions(2)[7]
    back = solution_from_spec(json.loads(json.dumps(solution_to_spec(sol))))
    assert back.is_valid()
    assert (back.F.exact() == sol.F.exact()).all()
    with pytest.raises(InputError):
        solution_to_spec(solution_from_spec(WAVE))


# ---- sweep

def test_rational_sweep(capsys):
    code, out, _ = run(["sweep", "--backend", "rational"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["summary"]["generators"] == 38 and rep["summary"]["currents"] == 50
    assert rep["summary"]["fail"] == 0
    assert all(r["exact_zero"] is True and "max" not in r for r in rep["rows"])


def test_float_sweep_is_deterministic(tmp_path, capsys):
    outs = []
    path = str(tmp_path / "r.json")
    for _ in range(2):
        assert main(["sweep", "--backend", "float", "--points", "25", "--seed", "4", "--output", path]) == 0
        outs.append(open(path, "rb").read())
    assert outs[0] == outs[1]
    rep = json.loads(outs[0])
    assert all(r["max"] <= 1e-9 for r in rep["rows"])


def test_parallel_sweep_matches_serial(capsys):
    _, a, _ = run(["sweep", "--backend", "float", "--points", "15"], capsys)
    _, b, _ = run(["sweep", "--backend", "float", "--points", "15", "--jobs", "3"], capsys)
    assert json.loads(a)["rows"] == json.loads(b)["rows"]


def test_text_format(capsys):
    code, out, _ = run(["sweep", "--backend", "float", "--points", "10", "--format", "text"], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[0].startswith("# sweep")
    assert sum(line.startswith("PASS ") for line in lines) == 88
    assert lines[-1].startswith("summary ")


# ---- bracket table and charges

def test_bracket_table_export(tmp_path, capsys):
    path = str(tmp_path / "t.json")
    code = main(["bracket-table", "--no-verify", "--output", path])
    rep = json.load(open(path))
    assert code == 0
    assert len(rep["rows"]) == 38 * 37 // 2
    audit = rep["summary"]["dimension_audit"]
    assert (audit["symmetry_algebra"], audit["nonlocal_symmetries"], audit["nonlocal_currents"],
            audit["killing_yano"]) == (38, 14, 15, 10)


@pytest.mark.parametrize("current", ["duality", "energy"])
def test_charge_command(capsys, current):
    code, out, _ = run(["charge", "--current", current, "--times", "0", "1.5"], capsys)
    row = json.loads(out)["rows"][0]
    assert code == 0 and row["difference"] <= 1e-6 and row["converged"]


def test_charge_rejects_non_period_box(capsys):
    code, _, err = run(["charge", "--box", "0", "3.14159", "0", "1", "0", "1"], capsys)
    assert code == 2 and "period" in err


def test_charge_rejects_polynomial_solution(tmp_path, capsys):
    spec = write(tmp_path, "p.json", {"type": "polynomial", "degree": 0})
    assert run(["charge", "--spec", spec], capsys)[0] == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "jointmaxwell", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "verify-solution" in res.stdout
