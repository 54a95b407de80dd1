"""JSON Schema for ``report.json``."""

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "leroy compression report",
    "type": "object",
    "required": [
        "original_nodes", "rewritten_nodes", "rewritten_plus_library_nodes",
        "compression_ratio", "library_growth_pct", "abstractions", "pruned",
        "rejected_call_sites",
    ],
    "properties": {
        "original_nodes": {"type": "integer", "minimum": 0},
        "rewritten_nodes": {"type": "integer", "minimum": 0},
        "rewritten_plus_library_nodes": {"type": "integer", "minimum": 0},
        "compression_ratio": {"type": "number", "exclusiveMinimum": 0},
        "library_growth_pct": {"type": "number"},
        "abstractions": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "body_nodes", "params", "returns", "sites"],
                "properties": {
                    "name": {"type": "string", "pattern": "^[A-Za-z_][A-Za-z0-9_]*$"},
                    "body_nodes": {"type": "integer", "minimum": 1},
                    "params": {"type": "array", "items": {"type": "string"}},
                    "returns": {"type": "array", "items": {"type": "string"}},
                    "sites": {"type": "integer", "minimum": 0},
                },
                "additionalProperties": False,
            },
        },
        "pruned": {
            "type": "object",
            "required": ["macro_like", "invalid_parameter", "too_small", "calls_abstraction"],
            "properties": {k: {"type": "integer", "minimum": 0}
                           for k in ("macro_like", "invalid_parameter", "too_small", "calls_abstraction")},
            "additionalProperties": False,
        },
        "rejected_call_sites": {"type": "integer", "minimum": 0},
        "dropped_abstractions": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["pattern", "reason"],
                "properties": {"pattern": {"type": "string"}, "reason": {"type": "string"}},
            },
        },
    },
    "additionalProperties": False,
}
