import csv
import io
import json
import shutil
import subprocess

import numpy as np
import pytest

from rikit.cli import main
from rikit.scenarios import scenario_names


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval(capsys):
    code, out, _ = run(capsys, "eval", "t*log(1+1/t)", "--at", "1,2")
    d = json.loads(out)
    assert code == 0 and d["status"] == "pass"
    assert d["checks"][0]["actual"] == pytest.approx(np.log(2))


def test_transform_plotdata(capsys):
    code, out, _ = run(capsys, "transform", "tilde", "max(1,t)", "--format", "plotdata")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "t,value" and len(lines) == 2050
    t, v = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]]).T
    assert np.all(np.diff(t) > 0) and np.all(np.diff(v) >= 0)


@pytest.mark.parametrize("kind", ["delta", "hat", "envelope", "j", "i"])
def test_transform_kinds(capsys, kind):
    code, out, _ = run(capsys, "transform", kind, "t*log(1+1/t)", "--no-timing")
    assert code == 0 and json.loads(out)["status"] == "pass"


def test_transform_hat_not_quasi_concave(capsys):
    code, _, err = run(capsys, "transform", "hat", "max(1,t)")
    assert code == 1 and "NotQuasiConcave" in err


def test_check_exit_codes(capsys):
    assert run(capsys, "check", "cond3", "max(1,t)")[0] == 0
    assert run(capsys, "check", "cond3", "t")[0] == 1
    assert run(capsys, "check", "b1", "t^0.5")[0] == 0
    assert run(capsys, "check", "thm45", "t^0.5")[0] == 0


def test_index(capsys):
    code, out, _ = run(capsys, "index", "t^0.3")
    assert code == 0
    assert json.loads(out)["checks"][0]["actual"] == pytest.approx(0.3, abs=0.02)


def test_wfun(capsys):
    code, out, _ = run(capsys, "wfun", "weak", "t^0.5", "--at", "1")
    assert code == 0 and json.loads(out)["checks"][0]["actual"] == pytest.approx(0.5)
    code, out, _ = run(capsys, "wfun", "lambda", "t", "--at", "1")
    assert code == 0 and json.loads(out)["checks"][0]["actual"] == "inf"


def test_optrange(capsys):
    code, out, _ = run(capsys, "optrange", "quasi", "t^0.5", "--at", "4")
    assert code == 0 and 0.5 <= json.loads(out)["checks"][0]["actual"] <= 8
    code, out, _ = run(capsys, "optrange", "norm", "t^0.5", "--fstar", "1:2,3:1")
    assert code == 0
    code, _, err = run(capsys, "optrange", "norm", "t", "--at", "1")
    assert code == 1 and "Condition3Violated" in err


def test_decompose_csv(capsys):
    code, out, _ = run(capsys, "decompose", "min(1,t)", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and rows[0]["description"] == "constant c"
    assert rows[2]["witness"] == "1.0"


def test_usage_errors(capsys):
    assert run(capsys, "eval", "t+")[0] == 2
    assert run(capsys, "eval", "exp(t)")[0] == 2
    assert run(capsys, "scenario", "no-such")[0] == 2
    for argv in (["transform", "nope", "t"], ["eval", "t", "--grid", "1,2"], []):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 2


def test_list(capsys):
    code, out, _ = run(capsys, "list")
    assert code == 0 and out.split() == scenario_names()


def test_out_file(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, out, _ = run(capsys, "scenario", "prop-4.10", "--out", str(path), "--no-timing")
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["status"] == "pass"


def test_scenario_deterministic(capsys):
    ca, a, _ = run(capsys, "scenario", "example-4.11", "--no-timing", "--format", "csv")
    cb, b, _ = run(capsys, "scenario", "example-4.11", "--no-timing", "--format", "csv")
    assert ca == cb == 0 and a == b


@pytest.mark.skipif(shutil.which("ri-kit") is None, reason="console script not installed")
def test_console_script():
    p = subprocess.run(["ri-kit", "eval", "max(1,t)", "--at", "2"], capture_output=True, text=True)
    assert p.returncode == 0 and json.loads(p.stdout)["checks"][0]["actual"] == 2.0
    p = subprocess.run(["ri-kit", "eval", "t+"], capture_output=True, text=True)
    assert p.returncode == 2 and "position 2" in p.stderr
