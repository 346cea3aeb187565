"""JSON Schemas for the CLI output documents.

Every command's stdout document must validate against
``document_schema(command)``.  Non-finite doubles are encoded as the strings
"inf" / "-inf" or as null (for NaN, e.g. a prefactor with no blocklength), so
value-like fields use the extended-number schema below.
"""

from __future__ import annotations

_NUMBER = {
    "oneOf": [
        {"type": "number"},
        {"enum": ["inf", "-inf"]},
        {"type": "null"},
    ]
}

_MATRIX = {
    "type": "array",
    "minItems": 1,
    "items": {
        "type": "array",
        "items": {
            "type": "array",
            "items": {"type": "number"},
            "minItems": 2,
            "maxItems": 2,
        },
    },
}

MANIFEST = {
    "type": "object",
    "required": ["command", "input_sha256", "seed", "version", "parameters"],
    "properties": {
        "command": {"enum": ["info", "augustin", "exponent", "simulate", "wiretap"]},
        "input_sha256": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
        "seed": {"type": ["integer", "null"]},
        "version": {"type": "string"},
        "parameters": {"type": "object"},
        "wall_time_s": {"type": "number"},
    },
    "additionalProperties": False,
}

_EXPONENT_REPORT = {
    "type": "object",
    "required": ["exponent", "alpha_star", "prefactor_log", "meta"],
    "properties": {
        "exponent": _NUMBER,
        "alpha_star": {"type": "number"},
        "prefactor_log": _NUMBER,
        "meta": {"type": "object"},
    },
    "additionalProperties": False,
}

_ESTIMATE = {
    "type": "object",
    "required": ["mean", "std_error", "trials", "seed"],
    "properties": {
        "mean": {"type": "number"},
        "std_error": {"type": "number"},
        "trials": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer"},
    },
    "additionalProperties": False,
}

_EXACT_VALUE = {
    "type": "object",
    "required": ["value"],
    "properties": {"value": {"type": "number"}},
    "additionalProperties": False,
}

_RATES = {
    "type": "object",
    "required": ["R", "R1", "R2"],
    "properties": {"R": {"type": "number"}, "R1": {"type": "number"}, "R2": {"type": "number"}},
    "additionalProperties": False,
}

RESULTS = {
    "info": {
        "type": "object",
        "required": [
            "alphabet_size",
            "dim_b",
            "shannon_entropy",
            "mutual_info",
            "conditional_entropy",
            "extractable_rate_limit",
        ],
        "properties": {
            "alphabet_size": {"type": "integer", "minimum": 1},
            "dim_b": {"type": "integer", "minimum": 1},
            "shannon_entropy": {"type": "number"},
            "mutual_info": {"type": "number"},
            "conditional_entropy": {"type": "number"},
            "extractable_rate_limit": {"type": "number"},
        },
        "additionalProperties": False,
    },
    "augustin": {
        "type": "object",
        "required": ["alpha", "value", "iterations", "final_step", "optimizer"],
        "properties": {
            "alpha": {"type": "number"},
            "value": {"type": "number"},
            "iterations": {"type": "integer", "minimum": 0},
            "final_step": {"type": "number"},
            "optimizer": _MATRIX,
        },
        "additionalProperties": False,
    },
    "exponent": _EXPONENT_REPORT,
    "simulate": {
        "oneOf": [
            _EXACT_VALUE,
            _ESTIMATE,
            {
                "type": "object",
                "required": ["d_pa", "d_sc", "gap"],
                "properties": {
                    "d_pa": {"type": "number"},
                    "d_sc": {"type": "number"},
                    "gap": {"type": "number"},
                },
                "additionalProperties": False,
            },
        ]
    },
    "wiretap": {
        "oneOf": [
            {
                "type": "object",
                "required": ["threshold", "mutual_info_bob", "mutual_info_eve"],
                "properties": {
                    "threshold": {"type": "number"},
                    "mutual_info_bob": {"type": "number"},
                    "mutual_info_eve": {"type": "number"},
                },
                "additionalProperties": False,
            },
            _EXPONENT_REPORT,
            {
                "type": "object",
                "required": ["rates", "bob_decoding_exponent", "leakage"],
                "properties": {
                    "rates": _RATES,
                    "bob_decoding_exponent": _EXPONENT_REPORT,
                    "leakage": {
                        "type": "object",
                        "required": [
                            "pa_joint",
                            "pa_key",
                            "bound_sum",
                            "direct",
                            "bins_joint",
                            "bins_key",
                            "realized_rates",
                            "exact",
                        ],
                        "properties": {
                            "pa_joint": {"oneOf": [_EXACT_VALUE, _ESTIMATE]},
                            "pa_key": {"oneOf": [_EXACT_VALUE, _ESTIMATE]},
                            "bound_sum": {"type": "number"},
                            "direct": {"type": ["number", "null"]},
                            "bins_joint": {"type": "integer", "minimum": 1},
                            "bins_key": {"type": "integer", "minimum": 1},
                            "realized_rates": _RATES,
                            "exact": {"type": "boolean"},
                        },
                        "additionalProperties": False,
                    },
                },
                "additionalProperties": False,
            },
        ]
    },
}


def document_schema(command: str) -> dict:
    """Schema for the full stdout document of one CLI command."""
    return {
        "type": "object",
        "required": ["manifest", "result", "units"],
        "properties": {
            "manifest": MANIFEST,
            "result": RESULTS[command],
            "units": {"enum": ["nats", "bits"]},
        },
        "additionalProperties": False,
    }
