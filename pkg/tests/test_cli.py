import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from opmin.cli import main

DATA = Path(__file__).resolve().parent.parent / "data"


def run(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out=out)
    return code, out.getvalue()


def test_validate_builtin_file():
    code, text = run("validate", DATA / "ass.cochain.json")
    assert code == 0 and "all checks passed" in text


def test_validate_corrupted_table():
    code, text = run("validate", DATA / "corrupted-ass.json")
    assert code == 1
    assert "FAIL associativity" in text and "violation" in text


def test_validate_tabular():
    code, text = run("validate", DATA / "s2xs3.json")
    assert code == 0


@pytest.mark.parametrize("operad,conv,r", [("Com", "cochain", 0), ("Ger", "cochain", 1), ("Ger", "chain", 0)])
def test_tameness(operad, conv, r):
    code, text = run("tameness", operad, "--convention", conv)
    assert code == 0 and f"r = {r}" in text


def test_tameness_from_file():
    code, text = run("tameness", DATA / "ger.cochain.json")
    assert "r = 1" in text


def test_free_dims():
    code, text = run("free-dims", "Com", "--gens", "x:2", "-N", "4")
    assert code == 0
    assert "degree 3: 0" in text and "degree 4: 1" in text


def test_free_dims_needs_cap():
    code, _ = run("free-dims", "Ger", "--gens", "a:1", "-N", "3")
    assert code == 2
    code, text = run("free-dims", "Ger", "--gens", "a:1", "-N", "3", "--arity-cap", "3")
    assert code == 0 and "modulo arity cap 3" in text


def test_model_compare_and_qiso(tmp_path):
    m1, m2 = tmp_path / "m1.json", tmp_path / "m2.json"
    code, text = run("minimal-model", DATA / "s2.json", "-N", "6", "--r", "1", "--out", m1)
    assert code == 0 and "generators by degree: 2:1, 3:1" in text
    code, _ = run("minimal-model", DATA / "s2.json", "-N", "6", "--r", "1", "--section", "random", "--seed", "7",
                  "--out", m2)
    assert code == 0
    h = tmp_path / "h.json"
    code, text = run("compare", m1, m2, "--out", h)
    assert code == 0 and "isomorphism" in text
    assert json.loads(h.read_text())["schema"] == "opmin.homotopy"


def test_check_qiso_on_saved_maps():
    code, text = run("check-qiso", DATA / "s2.model-map.json", "-N", "6")
    assert code == 0 and "yes" in text
    code, text = run("check-qiso", DATA / "s2.zero-map.json", "-N", "6")
    assert code == 1 and "cone degree 1: 1" in text


def test_lift_through_endpoint():
    code, text = run("lift", DATA / "s2.model-map.json", "--endpoint", "1")
    assert code == 0 and "w o g = f" in text


def test_convention_mismatch_exit_code():
    code, _ = run("minimal-model", DATA / "s2.json", "--convention", "chain")
    assert code == 2


def test_malformed_json(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _ = run("validate", bad)
    assert code == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "opmin", "tameness", "Lie"], capture_output=True, text=True)
    assert res.returncode == 0 and "r = 0" in res.stdout
