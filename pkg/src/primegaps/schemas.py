"""JSON schemas for every structured artifact the package emits.

Kept deliberately coarse: they pin the shape and required keys, not
value-level invariants (those live in the checker functions).
"""

_WITNESS = {
    "type": "array",
    "prefixItems": [
        {"type": "integer", "minimum": 1},
        {"type": "integer", "minimum": 2},
    ],
    "items": False,
    "minItems": 2,
}

ASSIGNMENT = {
    "type": "object",
    "required": ["x", "classes"],
    "properties": {
        "x": {"type": "integer", "minimum": 2},
        "classes": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["p", "a"],
                "properties": {
                    "p": {"type": "integer", "minimum": 2},
                    "a": {"type": "integer", "minimum": 0},
                },
            },
        },
    },
}

CERTIFICATE = {
    "type": "object",
    "required": ["m", "y", "witnesses"],
    "properties": {
        "m": {"type": "string", "pattern": "^[0-9]+$"},
        "y": {"type": "integer", "minimum": 0},
        "witnesses": {"type": "array", "items": _WITNESS},
    },
}

STAGE_REPORT = {
    "type": "object",
    "required": ["params", "stage1", "stage2", "stage3", "stage4", "final"],
    "properties": {
        "params": {
            "type": "object",
            "required": ["r", "x", "y", "z", "epsilon", "seed"],
        },
        "final": {
            "type": "object",
            "required": ["remainder", "covered", "y_prime", "verified_survivors"],
        },
    },
}

# CLI payloads, keyed by the "command" field each one carries.
CLI_PAYLOADS = {
    "gaps": {
        "type": "object",
        "required": ["command", "limit", "records"],
        "properties": {"records": {"type": "array", "items": {"type": "object"}}},
    },
    "jacobsthal": {
        "type": "object",
        "required": ["command", "j"],
        "properties": {"j": {"type": "integer", "minimum": 1}},
    },
    "ycover": {
        "type": "object",
        "required": ["command", "x", "mode", "y", "optimal", "witness"],
        "properties": {"witness": ASSIGNMENT},
    },
    "assemble": {
        "type": "object",
        "required": ["command", "certificate"],
        "properties": {"certificate": CERTIFICATE},
    },
    "check": {
        "type": "object",
        "required": ["command", "valid", "m", "y"],
        "properties": {"m": {"type": "string", "pattern": "^[0-9]+$"}},
    },
    "construct": {
        "type": "object",
        "required": ["command", "seed", "report"],
        "properties": {"report": STAGE_REPORT},
    },
    "stats.alpha": {
        "type": "object",
        "required": ["command", "r", "cutoff", "value", "tail_bound", "low_precision"],
    },
    "stats.beta": {
        "type": "object",
        "required": ["command", "kind", "r", "p", "beta", "matches_closed_form"],
    },
    "stats.degrees": {
        "type": "object",
        "required": ["command", "side", "i", "vertices", "predicted", "quantiles"],
    },
    "stats.montecarlo": {
        "type": "object",
        "required": ["command", "seed", "target", "trials", "empirical", "predicted"],
    },
    "stats.smooth": {
        "type": "object",
        "required": ["command", "y", "z", "count", "de_bruijn_prediction"],
    },
    "batch": {
        "type": "object",
        "required": ["command", "runs", "summary"],
        "properties": {
            "runs": {
                "type": "array",
                "items": {"type": "object", "required": ["status"]},
            },
            "summary": {"type": "object", "required": ["total", "ok"]},
        },
    },
}


def schema_for(payload: dict) -> dict:
    """Pick the schema matching a CLI payload by its 'command' field."""
    return CLI_PAYLOADS[payload["command"]]
