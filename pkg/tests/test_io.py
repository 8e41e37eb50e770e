import json
import math
from fractions import Fraction

import numpy as np
import pytest

from radialmax import ParameterError, SetSpec, generate
from radialmax.io import dumps_csv, dumps_json, load_set, loads_csv, loads_json, schema_tag, set_document


def test_json_schema_first_and_sorted():
    text = dumps_json("demo", {"z": 1, "a": {"y": 2, "b": Fraction(1, 2)}, "inf": math.inf})
    doc = json.loads(text)
    assert list(doc) == ["schema", "a", "inf", "z"]
    assert doc["schema"] == schema_tag("demo")
    assert list(doc["a"]) == ["b", "y"] and doc["a"]["b"] == "1/2"
    assert doc["inf"] == "inf"


def test_json_numpy_values():
    doc = loads_json(dumps_json("demo", {"a": np.arange(3), "b": np.float64(0.5), "c": np.bool_(True)}), "demo")
    assert doc["a"] == [0, 1, 2] and doc["b"] == 0.5 and doc["c"] is True
    with pytest.raises(ParameterError):
        loads_json(dumps_json("demo", {}), "other")


def test_csv_round_trip():
    rows = [{"x": 0.1, "ok": True, "n": 3}, {"x": 2.0, "ok": False, "n": 4}]
    text = dumps_csv("table", rows)
    assert text.splitlines()[:2] == ["# schema: radialmax/table/v1", "x,ok,n"]
    schema, back = loads_csv(text)
    assert schema == "radialmax/table/v1"
    assert back[0] == {"x": "0.1", "ok": "true", "n": "3"}
    assert dumps_csv("table", rows) == text
    with pytest.raises(ParameterError):
        loads_csv("x\n1\n")


def test_set_document_round_trip(tmp_path):
    spec = SetSpec("cantor", {"base": 3, "digits": [0, 2]}, 8)
    E = generate(spec)
    path = tmp_path / "set.json"
    path.write_text(dumps_json("set", set_document(spec, E, include_cells=True)))
    spec2, E2 = load_set(path)
    assert spec2 == spec and E2 == E
    _, E3 = load_set(path, depth=6)
    assert E3.depth == 6
    _, E4 = load_set(spec.to_dict())
    assert E4 == E
    with pytest.raises(ParameterError):
        load_set({"foo": 1})
    with pytest.raises(OSError):
        load_set(tmp_path / "missing.json")
