import json
import math

import jsonschema
import pytest

from dreadlock import Classification, Status, land, newton_periodic, parse_address, trace_ray
from dreadlock.report import (
    SCHEMA_NAMES,
    dumps,
    landing_record,
    load_schema,
    point_record,
    ray_record,
)


def test_dumps_floats_and_complex():
    text = dumps({"a": 0.1, "b": 2.0, "c": 1 + 2j, "d": math.inf, "e": [1, None, True]})
    assert '"a": 0.10000000000000001' in text
    assert '"b": 2.0' in text
    assert '"c": [1.0, 2.0]' in text
    assert '"d": null' in text
    assert text.endswith("\n")
    back = json.loads(text)
    assert back["c"] == [1.0, 2.0] and back["e"] == [1, None, True]


def test_dumps_round_trips_exactly():
    xs = [math.pi, 1e-300, -2.5e17, 1 / 3]
    assert json.loads(dumps(xs)) == xs


def test_dumps_enums_and_empty():
    assert json.loads(dumps({"s": Status.LANDED, "x": {}, "y": []})) == {
        "s": Status.LANDED.value, "x": {}, "y": []
    }


def test_dumps_is_deterministic():
    obj = {"z": [1 + 1e-17j, 3.0], "k": "v"}
    assert dumps(obj) == dumps(obj)


@pytest.mark.parametrize("name", SCHEMA_NAMES)
def test_schemas_are_valid(name):
    schema = load_schema(name)
    jsonschema.Draft202012Validator.check_schema(schema)


def test_records(exp2):
    rep = land(exp2, parse_address("(0)"), 16)
    rec = json.loads(dumps(landing_record(rep)))
    assert rec["address"] == "(0)" and rec["status"] == rep.status_text
    pt = newton_periodic(exp2, 1, 1.0)
    prec = json.loads(dumps(point_record(pt)))
    assert prec["classification"] == Classification.REPELLING.value
    ray = trace_ray(exp2, parse_address("(0)"), 1e4, 5)
    rrec = json.loads(dumps(ray_record(ray)))
    assert len(rrec["vertices"]) == len(ray.vertices)
