import json
import os
import subprocess
import sys

import pytest

from extcot import runner
from extcot.cli import main
from extcot.config import BUNDLED, ConfigError, load, loads

HEADER = """
[meta]
name = "tiny"
field = 2

[algebras.k]
kind = "field"

[algebras.D]
kind = "dual_numbers"

[modules.S]
algebra = "D"
action = [[[1]], [[0]]]
"""

NONASSOC = """
[meta]
name = "broken"
field = 2

# 1, b, c with b*b = c and b*c = b
[algebras.X]
kind = "structure"
unit = [1, 0, 0]
labels = ["1", "b", "c"]
mul = [[[1, 0, 0], [0, 1, 0], [0, 0, 1]],
       [[0, 1, 0], [0, 0, 1], [0, 1, 0]],
       [[0, 0, 1], [0, 0, 0], [0, 0, 0]]]

[[tasks]]
type = "validate"
algebra = "X"
"""


def _write(tmp_path, text, name="c.toml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_configs_lists_bundled(capsys):
    assert main(["configs"]) == 0
    assert capsys.readouterr().out.split() == list(BUNDLED)


def test_passing_config_exits_zero(tmp_path, capsys):
    path = _write(tmp_path, HEADER + """
[[tasks]]
type = "ext"
from = "S"
to = "S"
degree = 3
expect = 1
oracle = true

[[tasks]]
type = "validate"
algebra = "D"
""")
    assert main(["verify", path]) == 0
    out = capsys.readouterr().out
    assert "overall: pass" in out and "Ext^3 has dimension 1" in out


def test_failure_exits_one_with_witness(tmp_path, capsys):
    assert main(["report", _write(tmp_path, NONASSOC), "--format", "structured"]) == 1
    rep = json.loads(capsys.readouterr().out)
    task = rep["tasks"][0]
    assert task["status"] == "fail"
    assert {"kind": "associativity", "indices": [1, 1, 1], "text": "(b*b)*b != b*(b*b)",
            "recheck": {"type": "validate", "algebra": "X"}} in task["witnesses"]


def test_budget_exits_two(capsys):
    assert main(["verify", "a2_transport", "--tasks", "3", "--cap", "1"]) == 2
    assert "inconclusive" in capsys.readouterr().out


def test_parse_error_has_position(tmp_path, capsys):
    path = _write(tmp_path, "[meta]\nfield = 2\nname = \n")
    assert main(["verify", path]) == 1
    err = capsys.readouterr().err
    assert "parse error" in err and "line 3" in err and "column" in err


def test_unresolved_name_is_located(tmp_path, capsys):
    path = _write(tmp_path, HEADER + """
[[tasks]]
type = "ext"
from = "S"
to = "Nope"
""")
    assert main(["verify", path]) == 1
    out = capsys.readouterr().out
    assert "unresolved module or object 'Nope'" in out and "line" in out


def test_loader_errors():
    with pytest.raises(ConfigError, match="field"):
        loads("[meta]\nname = 'x'\n")
    with pytest.raises(ConfigError, match="meta"):
        loads("[algebras.k]\nkind = 'field'\n")
    with pytest.raises(ConfigError, match="no type"):
        loads("[meta]\nfield = 2\n[[tasks]]\nalgebra = 'k'\n")
    with pytest.raises(ConfigError, match="no config file"):
        load("does_not_exist")
    cfg = loads(HEADER)
    with pytest.raises(ConfigError, match="unknown kind"):
        loads(HEADER + "[algebras.Q]\nkind = 'weird'\n").algebra("Q")
    assert cfg.algebra("D") is cfg.algebra("D")


def test_unknown_task_type_fails(tmp_path, capsys):
    path = _write(tmp_path, HEADER + "[[tasks]]\ntype = 'frobnicate'\n")
    assert main(["verify", path]) == 1
    assert "unknown task type" in capsys.readouterr().out


def test_ext_subcommand(capsys):
    assert main(["ext", "a2_transport", "--from", "S1", "--to", "S2", "--degree", "1"]) == 0
    assert "Ext^1 has dimension 1" in capsys.readouterr().out
    assert main(["ext", "a2_transport", "--from", "ext:3", "--to", "ext:5", "--degree", "2"]) == 0
    assert main(["ext", "a2_transport", "--from", "S1", "--to", "Q"]) == 1


def test_report_dir_and_task_filter(tmp_path, capsys):
    d = tmp_path / "out"
    assert main(["verify", "a2_transport", "--tasks", "validate,4", "--report-dir", str(d)]) == 0
    rep = json.loads((d / "report.json").read_text())
    assert rep["settings"]["tasks"] == [1, 2, 4]
    assert [t["id"] for t in rep["tasks"]] == [1, 2, 4]
    assert "overall: pass" in (d / "report.txt").read_text()


def test_jobs_match_serial(capsys):
    a = runner.structured(runner.run_config(load("a2_transport"), only=["ext", "tor", "enumerate"]))
    b = runner.structured(runner.run_config(load("a2_transport"), only=["ext", "tor", "enumerate"], jobs=3))
    assert a == b


def test_witness_recheck_round_trip(tmp_path):
    # a wrong expectation gives a witness whose recheck task reproduces the value
    path = _write(tmp_path, HEADER + """
[[tasks]]
type = "ext"
from = "S"
to = "S"
degree = 2
expect = 0
""")
    rep = runner.verify_path(path)
    assert rep["status"] == "fail"
    recheck = rep["tasks"][0]["witnesses"][0]["recheck"]
    cfg = load(path)
    again = runner.run_task(cfg, 0, {k: v for k, v in recheck.items() if k != "expect"})
    assert again["status"] == "pass" and again["details"]["value"] == 1


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "extcot.cli", "configs"], capture_output=True, text=True, check=True)
    assert out.stdout.split() == list(BUNDLED)


def test_cap_from_environment():
    env = {**os.environ, "EXTCOT_ENUM_CAP": "1"}
    out = subprocess.run([sys.executable, "-m", "extcot.cli", "verify", "a2_transport", "--tasks", "3"],
                         capture_output=True, text=True, env=env)
    assert out.returncode == 2
