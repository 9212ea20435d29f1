from __future__ import annotations

import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from toolhub.errors import ToolError
from toolhub.protocol import (
    ToolCall,
    ToolResult,
    canonical_json,
    conforms_to_return_schema,
    error_result,
    is_valid_type,
    ok_result,
    parse_tool_call,
    parse_tool_spec,
    serialize_tool_spec,
    spec_from_dict,
    validate_arguments,
    validate_return_schema,
)

VALID_SPEC = {
    "name": "range_check",
    "description": "Checks a numeric interval.",
    "parameters": [
        {"name": "value", "type": "number", "description": "Value.", "required": True},
        {"name": "strict", "type": "boolean", "description": "Strict mode.", "required": False},
    ],
    "return_schema": {"in_range": "boolean"},
}


# -- type system -------------------------------------------------------------

def test_type_enumeration():
    for t in ("string", "integer", "number", "boolean", "object"):
        assert is_valid_type(t)
    assert is_valid_type("array<string>")
    assert is_valid_type("array<array<integer>>")
    assert not is_valid_type("float")
    assert not is_valid_type("array<>")
    assert not is_valid_type("array<unknown>")


# -- spec parsing -------------------------------------------------------------

def test_parse_roundtrip():
    spec = parse_tool_spec(json.dumps(VALID_SPEC))
    again = parse_tool_spec(serialize_tool_spec(spec))
    assert again == spec


def test_nested_parameter_form_equivalent():
    nested = {
        "name": VALID_SPEC["name"],
        "description": VALID_SPEC["description"],
        "parameter": {
            "type": "object",
            "properties": {
                "value": {"type": "number", "description": "Value."},
                "strict": {"type": "boolean", "description": "Strict mode."},
            },
            "required": ["value"],
        },
        "return_schema": {"in_range": "boolean"},
    }
    flat = spec_from_dict(VALID_SPEC)
    assert spec_from_dict(nested).parameters == flat.parameters


@pytest.mark.parametrize(
    "mutate, expected_detail",
    [
        (lambda d: d.update(name="Bad-Name"), "name"),
        (lambda d: d.update(name="x" * 200), "name"),
        (lambda d: d.pop("description"), "description"),
        (lambda d: d["parameters"].append(dict(d["parameters"][0])), "parameters[2].name"),
        (lambda d: d["parameters"][0].update(type="float"), "parameters[0].type"),
        (lambda d: d.update(return_schema={"x": "float"}), "return_schema.x"),
    ],
)
def test_invalid_specs_point_at_offending_field(mutate, expected_detail):
    doc = json.loads(json.dumps(VALID_SPEC))
    mutate(doc)
    with pytest.raises(ToolError) as exc:
        spec_from_dict(doc)
    assert exc.value.code == "SpecInvalid"
    assert exc.value.detail == expected_detail


def test_unknown_top_level_keys_preserved_in_settings():
    doc = dict(VALID_SPEC, vendor_hint={"retries": 2})
    spec = spec_from_dict(doc)
    assert spec.settings["vendor_hint"] == {"retries": 2}
    # and they survive serialization
    again = parse_tool_spec(serialize_tool_spec(spec))
    assert again.settings["vendor_hint"] == {"retries": 2}


_name = st.from_regex(r"[a-z][a-z0-9_]{0,20}", fullmatch=True)
_type = st.sampled_from(["string", "integer", "number", "boolean", "object", "array<string>"])


@st.composite
def spec_documents(draw):
    n_params = draw(st.integers(0, 4))
    names = draw(st.lists(_name, min_size=n_params, max_size=n_params, unique=True))
    return {
        "name": draw(_name),
        "description": draw(st.text(max_size=50)),
        "parameters": [
            {
                "name": name,
                "type": draw(_type),
                "description": draw(st.text(max_size=20)),
                "required": draw(st.booleans()),
            }
            for name in names
        ],
        "return_schema": draw(st.sampled_from([None, "object", {"value": "number"}])),
    }


@given(spec_documents())
def test_serialize_parse_is_identity(doc):
    spec = spec_from_dict(doc)
    assert parse_tool_spec(serialize_tool_spec(spec)) == spec


# -- call parsing --------------------------------------------------------------

def test_call_requires_exact_keys():
    call = parse_tool_call('{"name": "echo", "arguments": {"text": "hi"}}')
    assert call == ToolCall("echo", {"text": "hi"})
    for bad in (
        '{"name": "echo"}',
        '{"name": "echo", "arguments": {}, "extra": 1}',
        '{"arguments": {}}',
        '[1]',
        "not json",
        '{"name": "", "arguments": {}}',
        '{"name": "echo", "arguments": []}',
    ):
        with pytest.raises(ToolError):
            parse_tool_call(bad)


# -- argument validation ----------------------------------------------------------

def spec():
    return spec_from_dict(VALID_SPEC)


def test_validation_lists_all_missing_required():
    doc = json.loads(json.dumps(VALID_SPEC))
    doc["parameters"][1]["required"] = True
    with pytest.raises(ToolError) as exc:
        validate_arguments(ToolCall("range_check", {}), spec_from_dict(doc))
    assert exc.value.code == "MissingRequired"
    assert exc.value.detail == ["value", "strict"]


def test_validation_rejects_unknown_argument():
    with pytest.raises(ToolError) as exc:
        validate_arguments(ToolCall("range_check", {"value": 1.0, "ghost": 1}), spec())
    assert exc.value.code == "UnknownArgument"
    assert exc.value.detail == "ghost"


def test_validation_type_mismatch_names_param_expected_got():
    with pytest.raises(ToolError) as exc:
        validate_arguments(ToolCall("range_check", {"value": "3"}), spec())
    assert exc.value.code == "TypeMismatch"
    assert exc.value.detail == {"param": "value", "expected": "number", "got": "string"}


def test_no_coercion_and_bool_is_not_a_number():
    with pytest.raises(ToolError):
        validate_arguments(ToolCall("range_check", {"value": True}), spec())
    # integer is an acceptable number
    assert validate_arguments(ToolCall("range_check", {"value": 3}), spec()) == {"value": 3}


def test_optional_stays_absent():
    args = validate_arguments(ToolCall("range_check", {"value": 1.5}), spec())
    assert "strict" not in args


# -- results -----------------------------------------------------------------------

def test_result_envelope_exclusivity():
    with pytest.raises(ValueError):
        ToolResult("ok", payload=1, error=ToolError("ExecutionFailed", "x"))
    with pytest.raises(ValueError):
        ToolResult("error")
    with pytest.raises(ValueError):
        ToolResult("weird")
    with pytest.raises(ValueError):
        ToolResult("ok", payload=1, duration_ms=-1)


def test_result_serialization_roundtrip():
    ok = ok_result({"x": 1}, 12.5)
    assert ToolResult.from_dict(json.loads(ok.serialize())) == ok
    err = error_result(ToolError("Timeout", "too slow", detail={"s": 60}), 1.0)
    back = ToolResult.from_dict(json.loads(err.serialize()))
    assert back.error.code == "Timeout"
    assert back.error.detail == {"s": 60}


def test_canonical_json_is_sorted_and_compact():
    assert canonical_json({"b": 1, "a": [1, 2]}) == '{"a":[1,2],"b":1}'


# -- return schema conformance ---------------------------------------------------

def test_return_schema_validation():
    validate_return_schema({"a": {"b": "array<integer>"}})
    with pytest.raises(ToolError):
        validate_return_schema({"a": "float"})
    with pytest.raises(ToolError):
        validate_return_schema(3)


@pytest.mark.parametrize(
    "value, schema, ok, path",
    [
        ({"x": 1}, {"x": "integer"}, True, ""),
        ({"x": "1"}, {"x": "integer"}, False, ".x"),
        ({}, {"x": "integer"}, False, ".x"),
        ({"x": {"y": [1, "z"]}}, {"x": {"y": "array<integer>"}}, False, ".x.y[1]"),
        ([1, 2], "array<integer>", True, ""),
        (None, None, True, ""),
        ("anything", None, True, ""),
        (True, "integer", False, "."),
    ],
)
def test_conformance_paths(value, schema, ok, path):
    got_ok, got_path = conforms_to_return_schema(value, schema)
    assert got_ok is ok
    if not ok:
        assert got_path == path


@given(st.recursive(st.none() | st.booleans() | st.integers() | st.floats(allow_nan=False) | st.text(max_size=5), lambda c: st.lists(c, max_size=3) | st.dictionaries(st.text(max_size=3), c, max_size=3), max_leaves=10))
def test_conformance_is_total(value):
    result = conforms_to_return_schema(value, {"a": "array<object>"})
    assert isinstance(result, tuple)
