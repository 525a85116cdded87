"""JSON schemas for every file the package reads or writes."""

from __future__ import annotations

import jsonschema

# json.dump writes Infinity for math.inf; the CLI rewrites it to the string "inf"
_EXT_REAL = {"anyOf": [{"type": "number"}, {"const": "inf"}]}
_NUM_LIST = {"type": "array", "items": {"type": "number"}}
_PAIR = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}

MEASURE = {
    "type": "object",
    "required": ["density"],
    "properties": {
        "density": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["from", "to", "coeff"],
                "properties": {
                    "from": {"type": "number"},
                    "to": {"type": "number"},
                    "center": {"type": "number"},
                    "coeff": {"type": "number", "minimum": 0},
                    "exponent": {"type": "number", "minimum": 0},
                },
                "additionalProperties": False,
            },
        },
        "atoms": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["at", "mass"],
                "properties": {"at": {"type": "number"},
                               "mass": {"type": "number", "exclusiveMinimum": 0}},
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
}

LIPSCHITZ = {
    "type": "object",
    "required": ["breakpoints", "slopes"],
    "properties": {
        "breakpoints": _NUM_LIST,
        "slopes": {**_NUM_LIST, "minItems": 1},
        "value_at_left": {"type": "number"},
    },
    "additionalProperties": False,
}

MODULUS_RESULT = {
    "type": "object",
    "required": ["value", "gap", "iterations", "converged"],
    "properties": {
        "value": {"type": "number", "minimum": 0},
        "gap": _EXT_REAL,
        "iterations": {"type": "integer", "minimum": 0},
        "g": _NUM_LIST,
        "lambda": _NUM_LIST,
        "edges": _NUM_LIST,
        "max_violation": {"type": "number"},
        "converged": {"type": "boolean"},
        "regularized": {"type": "boolean"},
        "closed_form": {"type": "number", "minimum": 0},
    },
}

NP_REPORT = {
    "type": "object",
    "required": ["interval", "p", "points", "subintervals"],
    "properties": {
        "interval": _PAIR,
        "p": {"type": "number", "exclusiveMinimum": 1},
        "points": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["at", "exponent", "threshold"],
                "properties": {"at": {"type": "number"}, "exponent": {"type": "number"},
                               "threshold": {"type": "number"}},
            },
        },
        "subintervals": {"type": "array", "items": _PAIR},
    },
}

WEIGHT_SUMMARY = {
    "type": "object",
    "required": ["alpha", "window", "stages", "epsilon_rule", "zeros", "segments"],
    "properties": {
        "alpha": {"type": "number", "exclusiveMinimum": 0},
        "window": _PAIR,
        "stages": {"type": "integer", "minimum": 0},
        "epsilon_rule": {"type": "string"},
        "zeros": {"type": "array", "items": {"type": "string"}},
        "segments": {"type": "integer", "minimum": 1},
        "min_r": {"type": "number"},
    },
}

MC_RESULT = {
    "type": "object",
    "required": ["dimension", "s", "samples", "seed", "estimate", "stderr", "bound", "ok"],
    "properties": {
        "dimension": {"type": "integer", "minimum": 1},
        "s": {"type": "number"},
        "samples": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer"},
        "estimate": {"type": "number"},
        "stderr": {"type": "number", "minimum": 0},
        "bound": _EXT_REAL,
        "ok": {"type": "boolean"},
    },
}

CONFIG = {
    "type": "object",
    "properties": {
        "alpha": {"type": "number"},
        "stages": {"type": "integer"},
        "window": _PAIR,
        "p": {"anyOf": [{"type": "number"}, _NUM_LIST]},
        "scale_depth": {"type": "integer", "minimum": 0},
        "cells": {"type": "integer", "minimum": 1},
        "measure": {"type": "string"},
        "function": {"type": "string"},
        "out": {"type": "string"},
        "seed": {"type": "integer"},
        "epsilon_rule": {"type": "string"},
    },
}

SCHEMAS = {
    "measure": MEASURE,
    "lipschitz": LIPSCHITZ,
    "modulus": MODULUS_RESULT,
    "np": NP_REPORT,
    "weight": WEIGHT_SUMMARY,
    "mc": MC_RESULT,
    "config": CONFIG,
}


def validate(obj, name: str) -> None:
    """Raise ``jsonschema.ValidationError`` unless ``obj`` matches schema ``name``."""
    jsonschema.validate(obj, SCHEMAS[name])
