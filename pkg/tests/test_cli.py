import json
import re
import subprocess
import sys

import pytest

from centralam.amenability import report
from centralam.catalog_io import chartable_to_json, report_to_json
from centralam.cli import main

from conftest import table


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_am_all_text(capsys):
    code, out, _ = run(capsys, "am", "sym:3", "--which", "all")
    assert code == 0
    assert "AMZA = 7/3 (2.333333333333)" in out
    assert "AMZL = 7/3 (2.333333333333)" in out
    assert "ass = 5/3 (1.666666666667)" in out


def test_am_single_quantity(capsys):
    assert run(capsys, "am", "dihedral:16", "--which", "za")[1] == "43/16 (2.687500000000)\n"
    assert run(capsys, "am", "sl2:3", "--which", "zl")[1] == "5/1 (5.000000000000)\n"
    assert run(capsys, "am", "sl2:3", "--which", "ass")[0] == 0


def test_verify_text(capsys):
    code, out, _ = run(capsys, "verify", "sym:3", "thm-2.2")
    assert code == 0
    assert out == "applicable: yes; closed=7/3 direct_za=7/3 direct_zl=7/3 equal=yes\n"
    assert run(capsys, "verify", "sl2:3", "thm-4.6")[1].startswith("applicable: no")


def test_json_mode_is_module_serialization(capsys):
    _, out, _ = run(capsys, "am", "sl2:3", "--format", "json")
    assert json.loads(out) == json.loads(json.dumps(report_to_json(report(table("sl2:3")))))
    _, out, _ = run(capsys, "chartab", "alt:4", "--format", "json")
    assert json.loads(out) == chartable_to_json(table("alt:4"))


def test_chartab_text_and_csv(capsys):
    _, out, _ = run(capsys, "chartab", "cyclic:3")
    assert "E(3)" in out
    _, out, _ = run(capsys, "chartab", "sym:3", "--format", "csv")
    assert out.splitlines()[0] == ",C0,C1,C2"


def test_hypergroup(capsys):
    _, out, _ = run(capsys, "hypergroup", "sl2:3", "--construction", "conj")
    assert "AM = 5/1" in out
    _, out, _ = run(capsys, "hypergroup", "sl2:3", "--construction", "dual")
    assert "AM = 39/8" in out


def test_quotient_named_subgroup(capsys):
    code, out, _ = run(capsys, "quotient", "perm:sg_192_1022", "N")
    assert code == 0
    assert "AMZA(G) = 1727/128 (13.492187500000)" in out
    assert "AMZA(G/N) = 497/32 (15.531250000000)" in out
    assert "ass(G) = 923/128 (7.210937500000)" in out
    assert "ass(G/N) = 529/64 (8.265625000000)" in out
    assert "AMZA(G) >= AMZA(G/N): no" in out


def test_survey_command(capsys, tmp_path):
    store = tmp_path / "s.jsonl"
    code, out, _ = run(capsys, "survey", "sym:3", "sl2:3", "dihedral:8", "--out", str(store))
    assert code == 0
    assert "AMZA != AMZL: 1" in out and "minimum non-abelian AMZA: 7/4" in out
    assert len(store.read_text().splitlines()) == 3
    _, out, _ = run(capsys, "survey", "--out", str(tmp_path / "e.jsonl"))
    assert "groups: 0" in out


@pytest.mark.parametrize("argv,code,tag", [
    (["am", "bogus:3"], 1, "group_spec"),
    (["am", "cyclic:50", "--max-order", "10"], 1, "order_too_large"),
    (["quotient", "sym:3", "0"], 1, "improper_subgroup"),
    (["am", "ctbl:/nonexistent.json"], 1, "fixture"),
    (["am", "sym:3", "--which", "q"], 2, "usage"),
    (["am", "sym:3", "--tol-exp", "5"], 2, "usage"),
    (["nosuch"], 2, "usage"),
    (["verify", "sym:3", "thm-9"], 2, "usage"),
])
def test_error_paths(capsys, argv, code, tag):
    got, out, err = run(capsys, *argv)
    assert got == code and out == ""
    assert len(err.splitlines()) == 1
    assert re.match(rf"error\[{tag}\]: \S", err)


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"max_order": 5}))
    assert run(capsys, "am", "sym:3", "--config", str(cfg))[0] == 1
    cfg.write_text(json.dumps({"colour": 1}))
    assert run(capsys, "am", "sym:3", "--config", str(cfg))[0] == 2
    cfg.write_text(json.dumps({"format": "csv"}))
    assert run(capsys, "am", "sym:3", "--config", str(cfg))[1].startswith("quantity,exact,decimal")


def test_output_is_byte_identical_across_processes():
    argv = [sys.executable, "-m", "centralam", "am", "heisenberg:3", "--format", "json"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and a
