"""JSON schemas for every CLI output, keyed by command."""

SCHEMA_VERSION = "1.0"

_value = {"type": "string"}
_base = {"schema_version": {"const": SCHEMA_VERSION}, "command": {"type": "string"}}


def _obj(props: dict, required: list) -> dict:
    return {"type": "object", "properties": {**_base, **props},
            "required": ["schema_version", "command", *required]}


SCHEMAS = {
    "records": _obj({
        "x": {"type": "array", "items": _value},
        "y": {"type": "array", "items": _value},
        "start": {"type": "integer", "minimum": 1},
        "N": {"type": "integer", "minimum": 1},
        "norm": {"type": "string"},
        "zero_hit": {"type": "boolean"},
        "records": {"type": "array", "items": {
            "type": "object",
            "properties": {"t": {"type": "integer"}, "delta": _value,
                           "delta_exact": {"type": ["string", "null"]}},
            "required": ["t", "delta", "delta_exact"]}},
    }, ["x", "y", "N", "records", "zero_hit"]),
    "sum": _obj({
        "regime": {"type": "string"},
        "ell": {"type": "integer", "minimum": 1},
        "partials": {"type": "array", "items": {
            "type": "array", "prefixItems": [{"type": "integer"}, _value],
            "minItems": 2, "maxItems": 2}},
        "increments": {"type": "array", "items": {
            "type": "array", "prefixItems": [{"type": "integer"}, _value],
            "minItems": 2, "maxItems": 2}},
        "verdict": {"enum": ["diverging", "converging", "inconclusive"]},
        "exact": {"type": "boolean"},
        "certificate": {"type": ["object", "null"]},
    }, ["regime", "ell", "partials", "increments", "verdict", "exact"]),
    "psi": _obj({
        "psi": {"type": "string"},
        "values": {"type": "array", "items": _value},
        "members": {"type": ["array", "null"], "items": {"type": "integer"}},
        "discretized": {"type": ["array", "null"], "items": {"type": "integer"}},
        "divergence": {"type": ["object", "null"]},
    }, ["psi", "values"]),
    "witness": _obj({
        "x": {"type": "array", "items": _value},
        "n": {"type": "array", "items": {"type": "integer"}},
        "a": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
        "K": {"type": "integer", "minimum": 1},
        "y": {"type": "object",
              "properties": {"mid": {"type": "array", "items": _value},
                             "radius": _value, "truncation_radius": _value},
              "required": ["mid", "radius"]},
        "bounds": {"type": "array"},
        "verification": {"type": ["object", "null"]},
    }, ["x", "n", "a", "K", "y", "bounds"]),
    "rational": _obj({
        "x": {"type": "array", "items": _value},
        "y": {"type": "array", "items": _value},
        "contains_integer": {"type": "boolean"},
        "least_n": {"type": ["integer", "null"]},
        "modulus": {"type": ["integer", "null"]},
        "period": {"type": "integer", "minimum": 1},
        "min_dist": _value,
        "s_finite": {"type": "boolean"},
        "membership": {"type": "string"},
    }, ["x", "y", "contains_integer", "least_n", "period", "min_dist", "membership"]),
    "rational-sweep": _obj({
        "sweep": {"type": "array", "items": {
            "type": "object",
            "properties": {"x": _value, "y": _value, "contains_integer": {"enum": ["true", "false"]},
                           "least_n": {"type": ["integer", "string"]},
                           "period": {"type": "integer", "minimum": 1}, "min_dist": _value},
            "required": ["x", "y", "contains_integer", "least_n", "period", "min_dist"]}},
    }, ["sweep"]),
    "cf": _obj({
        "x": _value,
        "terms": {"type": "array", "items": {"type": "integer"}},
        "complete": {"type": "boolean"},
        "convergents": {"type": "array", "items": {
            "type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2}},
        "literal": {"type": "string"},
    }, ["x", "terms", "convergents", "literal"]),
    "error": {
        "type": "object",
        "properties": {
            "schema_version": {"const": SCHEMA_VERSION},
            "error": {"type": "object",
                      "properties": {"type": {"type": "string"}, "message": {"type": "string"},
                                     "exit_code": {"enum": [2, 3, 4]}},
                      "required": ["type", "message", "exit_code"]},
        },
        "required": ["schema_version", "error"],
    },
}
