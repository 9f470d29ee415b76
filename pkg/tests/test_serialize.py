import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from opmin import serialize as ser
from opmin.builtins import builtin, shared_builtin
from opmin.engine import minimal_model
from opmin.homotopy import compare_models
from opmin.operad import validate
from opmin.samples import monomial_algebra, sphere


def round_trip(d, load, **kw):
    text = ser.dumps(d)
    obj = load(json.loads(text), **kw)
    return obj, text


@given(st.fractions(max_denominator=1000))
def test_rational_round_trip(x):
    assert ser.load_rat(ser.dump_rat(x)) == x


@pytest.mark.parametrize("bad", [0.5, True, None, "1/0", "x"])
def test_rejects_bad_rationals(bad):
    with pytest.raises(ser.SchemaError):
        ser.load_rat(bad, "$.c")


@pytest.mark.parametrize("conv", ["cochain", "chain"])
@pytest.mark.parametrize("name", ["Com", "Ass", "Lie", "Ger"])
def test_operad_round_trip(name, conv):
    p = builtin(name, conv, 3)
    d = ser.operad_to_json(p)
    q, text = round_trip(d, ser.operad_from_json)
    assert ser.dumps(ser.operad_to_json(q)) == text
    assert validate(q).ok


def test_builtin_reference():
    p = shared_builtin("Lie", "chain", 4)
    d = ser.operad_to_json(p, inline=False)
    assert d["builtin"] == "Lie"
    assert ser.operad_from_json(d) is p


def test_suspended_operads_are_written_inline():
    p = builtin("Com", "cochain", 3, suspension=1)
    d = ser.operad_to_json(p, inline=False)
    assert "builtin" not in d
    assert validate(ser.operad_from_json(d)).ok


def test_tabular_round_trip(com):
    a = monomial_algebra(com, {"x": 2, "y": 3}, {}, 8)
    b, text = round_trip(ser.tabular_to_json(a), ser.tabular_from_json)
    assert ser.dumps(ser.tabular_to_json(b)) == text


def test_model_and_homotopy_round_trip(com):
    s2 = sphere(com, 2, 10)
    m1 = minimal_model(s2, 1, 6)
    text = ser.dumps(ser.model_to_json(m1))
    m1b = ser.model_from_json(json.loads(text))
    assert ser.dumps(ser.model_to_json(m1b)) == text
    assert m1b.generator_dims() == m1.generator_dims()
    res = compare_models(m1, minimal_model(s2, 1, 6))
    h = res.homotopy
    htext = ser.dumps(ser.homotopy_to_json(h))
    hb = ser.homotopy_from_json(json.loads(htext))
    assert ser.dumps(ser.homotopy_to_json(hb)) == htext


def test_header_checks(com):
    d = ser.tabular_to_json(sphere(com, 2, 6))
    for key, val, frag in [("schema_version", 99, "unsupported version"), ("schema", "opmin.nope", "expected"),
                           ("convention", "sideways", "convention")]:
        bad = dict(d, **{key: val})
        with pytest.raises(ser.SchemaError) as e:
            ser.tabular_from_json(bad)
        assert frag in str(e.value)
    bad = dict(d)
    del bad["schema_version"]
    with pytest.raises(ser.SchemaError, match="schema_version"):
        ser.tabular_from_json(bad)


def test_float_coefficient_path_is_reported(com):
    d = ser.operad_to_json(builtin("Ass", "cochain", 3))
    d["compositions"][0][4] = 1.0
    with pytest.raises(ser.SchemaError) as e:
        ser.operad_from_json(d)
    assert "compositions[0]" in str(e.value)


def test_workspace_rejects_mixed_conventions(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    ser.save(ser.tabular_to_json(sphere(shared_builtin("Com", "cochain", 4), 2, 6)), a)
    ser.save(ser.tabular_to_json(sphere(shared_builtin("Com", "chain", 4), 2, 6)), b)
    ws = ser.Workspace()
    ws.load(a)
    with pytest.raises(ser.SchemaError, match="mixes"):
        ws.load(b)


def test_workspace_shares_targets(tmp_path, com):
    s2 = sphere(com, 2, 10)
    for i, seed in enumerate((0, 1)):
        ser.save(ser.model_to_json(minimal_model(s2, 1, 6)), tmp_path / f"m{i}.json")
    ws = ser.Workspace()
    m0, m1 = ws.load(tmp_path / "m0.json"), ws.load(tmp_path / "m1.json")
    assert m0.target is m1.target


def test_workspace_env(tmp_path, monkeypatch, com):
    ser.save(ser.tabular_to_json(sphere(com, 2, 6)), tmp_path / "s2.json")
    monkeypatch.setenv(ser.WORKSPACE_ENV, str(tmp_path))
    assert ser.resolve("s2.json") == tmp_path / "s2.json"


def test_unreadable_file():
    with pytest.raises(ser.SchemaError, match="cannot read"):
        ser.read_json("/nonexistent/file.json")


def test_vector_format():
    assert ser.dump_vec({2: Fraction(1, 2), 0: Fraction(-3)}) == [[0, "-3"], [2, "1/2"]]
    with pytest.raises(ser.SchemaError):
        ser.load_vec([[0]], "$.v")
