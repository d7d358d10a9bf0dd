import io
import json

import pytest

from neron.corpus import builtin_raw
from neron.schema import (SchemaError, ValidationError, dump_document, encode_int,
                          parse_document, parse_input)

S3 = [{"name": "a", "matrix": [[0, 1, 0], [1, 0, 0], [0, 0, 1]]},
      {"name": "b", "matrix": [[0, 0, 1], [1, 0, 0], [0, 1, 0]]}]


def gm():
    return {"rank": 1, "galois": {"generators": []}}


def sign(**extra):
    return {"rank": 1, "galois": {"generators": [{"name": "s", "matrix": [[-1]]}]}, **extra}


def test_minimal_document():
    doc = parse_document(gm())
    assert doc.kind == "torus"
    T = doc.torus()
    assert T.rank == 1 and T.galois.order == 1


def test_non_unimodular_generator():
    raw = {"rank": 1, "galois": {"generators": [{"matrix": [[2]]}]}}
    with pytest.raises(ValidationError) as e:
        parse_document(raw)
    assert e.value.kind == "NonUnimodularGenerator"
    assert e.value.path == "$.galois.generators[0].matrix"


def test_norm_one_document():
    T = parse_document(sign(inertia=["s"])).torus()
    assert T.inertia.order == 2


@pytest.mark.parametrize("raw, path", [
    ({"galois": {"generators": []}}, "$.rank"),
    ({"rank": "x", "galois": {"generators": []}}, "$.rank"),
    ({"rank": True, "galois": {"generators": []}}, "$.rank"),
    ({**gm(), "schema": "other/2"}, "$.schema"),
    ({**gm(), "bogus": 1}, "$.bogus"),
    ([], "$"),
    ({"rank": 2, "galois": {"generators": [{"matrix": [[1, 0]]}]}},
     "$.galois.generators[0].matrix"),
    ({**gm(), "options": {"speed": 3}}, "$.options.speed"),
])
def test_schema_error_paths(raw, path):
    with pytest.raises(SchemaError) as e:
        parse_document(raw)
    assert e.value.path == path


def test_invalid_json_and_missing_file(tmp_path):
    with pytest.raises(SchemaError):
        parse_input("{not json")
    with pytest.raises(SchemaError):
        parse_input(str(tmp_path / "absent.json"))


def test_parse_input_sources(tmp_path):
    text = json.dumps(sign(inertia=["s"]))
    p = tmp_path / "t.json"
    p.write_text(text)
    docs = [parse_input(text), parse_input(str(p)), parse_input(io.StringIO(text))]
    assert docs[0] == docs[1] == docs[2]


def test_big_integers():
    assert encode_int(2 ** 53) == str(2 ** 53)
    assert encode_int(-(2 ** 53)) == str(-(2 ** 53))
    assert encode_int(2 ** 53 - 1) == 2 ** 53 - 1
    raw = {"rank": 1, "galois": {"generators": [{"matrix": [["-1"]]}]}}
    assert parse_document(raw).data["galois"]["generators"][0]["matrix"] == [[-1]]


@pytest.mark.parametrize("raw", builtin_raw(), ids=lambda r: r["name"])
def test_round_trip(raw):
    doc = parse_document(raw)
    again = parse_document(json.loads(json.dumps(dump_document(doc))))
    assert again == doc


def test_non_normal_inertia():
    raw = {"rank": 3, "galois": {"generators": S3}, "inertia": ["a"]}
    with pytest.raises(ValidationError) as e:
        parse_document(raw)
    assert e.value.kind == "NonNormalSubgroupForResidualAction" and e.value.path == "$.inertia"


def test_frobenius_must_generate():
    with pytest.raises(ValidationError) as e:
        parse_document(sign(frobenius="1"))
    assert e.value.kind == "FrobeniusNotGenerating" and e.value.path == "$.frobenius"
    # the quotient S3/A3 is generated by a transposition, not by a 3-cycle
    parse_document({"rank": 3, "galois": {"generators": S3}, "inertia": ["b"], "frobenius": "a"})
    with pytest.raises(ValidationError):
        parse_document({"rank": 3, "galois": {"generators": S3}, "inertia": ["b"],
                        "frobenius": "b"})


def test_unknown_word():
    with pytest.raises(ValidationError) as e:
        parse_document(sign(inertia=["t"]))
    assert e.value.path == "$.inertia"


def test_inexact_ses():
    base = {"rank": 2, "galois": {"generators": [{"name": "s", "matrix": [[0, 1], [1, 0]]}]},
            "inertia": ["s"]}
    good = {"t1": {"rank": 1, "images": [[[-1]]]}, "t3": {"rank": 1, "images": [[[1]]]},
            "a": [[1], [1]], "b": [[1, -1]]}
    assert parse_document({**base, "ses": good}).kind == "ses"
    with pytest.raises(ValidationError) as e:
        parse_document({**base, "ses": {**good, "a": [[2], [2]]}})
    assert e.value.kind == "NotExactInput" and e.value.path == "$.ses"
    with pytest.raises(ValidationError):
        parse_document({**base, "ses": {**good, "t1": {"rank": 1, "images": [[[1]]]}}})
