import csv
import io
import json
from fractions import Fraction as F

import pytest
from hypothesis import given

from congested_floc import io as rio
from congested_floc.audit.deviations import unilateral_audit
from congested_floc.audit.ratios import approximation_ratio
from congested_floc.model import Instance

from conftest import instances

LOF = Instance.build([(0, 0), (F(1, 7), 1), (1, 1)], {0: 0, 1: F(1, 4)}, name="lof")


def test_load_schema_example():
    inst = rio.loads_instance('{"groups":[{"id":0,"alpha":"1/4"}],"agents":[{"x":"1/7","group":0}]}')
    assert inst.alpha == {0: F(1, 4)}
    assert inst.locations == (F(1, 7),)


def test_decimals_are_exact():
    inst = rio.loads_instance('{"groups":[{"id":0,"alpha":0.1}],"agents":[{"x":"0.3","group":0},{"x":1,"group":0}]}')
    assert inst.alpha[0] == F(1, 10)
    assert inst.locations == (F(3, 10), 1)


@pytest.mark.parametrize("text", [
    "not json",
    "[]",
    '{"groups": []}',
    '{"groups":[{"id":0}],"agents":[]}',
    '{"groups":[{"id":0,"alpha":"x"}],"agents":[]}',
    '{"groups":[{"id":0,"alpha":0}],"agents":[{"x":"3/2","group":0}]}',
    '{"groups":[{"id":0,"alpha":0}],"agents":[{"x":0,"group":1}]}',
    '{"groups":[{"id":"a","alpha":0}],"agents":[]}',
    '{"groups":[{"id":0,"alpha":true}],"agents":[]}',
])
def test_malformed(text):
    with pytest.raises(rio.InstanceFormatError):
        rio.loads_instance(text)


def test_missing_file(tmp_path):
    with pytest.raises(rio.InstanceFormatError):
        rio.load_instance(tmp_path / "nope.json")


@given(instances(consistent=False))
def test_roundtrip(inst):
    assert rio.loads_instance(rio.dumps_instance(inst)) == inst


@pytest.mark.parametrize("value, text", [
    (F(1, 3), "0.333333333333"),
    (F(17, 8), "2.125"),
    (F(0), "0"),
    (F(2), "2"),
    (F(1, 1000), "0.001"),
    (F(1, 10**9), "1e-9"),
    (F(10**13, 3), "3.33333333333e+12"),
    (float("inf"), "inf"),
])
def test_decimal_rendering(value, text):
    assert rio.decimal(value) == text


def test_ratio_json_field_order():
    rep = approximation_ratio("lofm", LOF, "max")
    doc = json.loads(rio.dumps_json(rep))
    assert list(doc)[:4] == ["mechanism", "objective", "mechanism_value", "mechanism_value_decimal"]
    assert doc["ratio"] == "17/8" and doc["ratio_decimal"] == "2.125"
    assert doc["witness"] == "lof"


def test_ratio_csv_row():
    rep = approximation_ratio("lofm", LOF, "max")
    text = rio.dumps_csv(rio.RATIO_COLUMNS, [rio.ratio_row(rep)])
    rows = list(csv.DictReader(io.StringIO(text)))
    assert tuple(rows[0]) == rio.RATIO_COLUMNS
    assert rows[0]["ratio"] == "17/8"
    assert rows[0]["in_optimal_set"] == "false"


def test_violation_serialization():
    inst = Instance.build([(0, 0), (1, 1), (1, 1)], {0: 0, 1: F(3, 5)}, name="ce")
    v = unilateral_audit("resm", inst, "group")[0]
    doc = rio.to_jsonable(v)
    assert list(doc) == ["deviators", "misreports", "truthful_facility", "truthful_facility_decimal",
                         "deviated_facility", "deviated_facility_decimal", "cost_before",
                         "cost_before_decimal", "cost_after", "cost_after_decimal", "gain", "gain_decimal"]
    assert doc["misreports"] == [[1, {"x": "1", "group": 0}]]
    row = rio.violation_row(v, instance="ce", mechanism="resm", deviation="group", audit="unilateral")
    assert tuple(row) == rio.VIOLATION_COLUMNS
    assert row["misreports"] == "1:1@0"
    assert row["gain"] == "2/5"
