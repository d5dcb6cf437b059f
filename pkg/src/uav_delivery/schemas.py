"""JSON Schemas for every JSON document the package reads or writes."""

from __future__ import annotations

import jsonschema

_NUM = {"type": "number"}
_INT = {"type": "integer"}

INSTANCE = {
    "type": "object",
    "required": ["schema_version", "depot", "customers"],
    "properties": {
        "schema_version": {"const": 1},
        "seed": {"type": ["integer", "null"]},
        "depot": {
            "type": "object",
            "required": ["lat", "lon"],
            "properties": {"lat": {"type": "number", "minimum": -90, "maximum": 90},
                           "lon": {"type": "number", "minimum": -180, "maximum": 180}},
        },
        "uav": {"type": "object", "additionalProperties": _NUM},
        "environment": {"type": "object", "additionalProperties": _NUM},
        "economics": {
            "type": "object",
            "properties": {
                "price_constant_k": _NUM,
                "discount_tiers": {"type": "array", "items": _NUM},
                "tier_times_s": {"type": "array", "items": _NUM},
            },
        },
        "customers": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "lat", "lon", "weight_kg"],
                "properties": {"id": {"type": "integer", "minimum": 1}, "lat": _NUM, "lon": _NUM,
                               "weight_kg": {"type": "number", "exclusiveMinimum": 0}},
            },
        },
    },
}

ROUTES = {
    "type": "object",
    "required": ["type", "features"],
    "properties": {
        "type": {"const": "FeatureCollection"},
        "manifest": {"type": "string"},
        "features": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["type", "geometry", "properties"],
                "properties": {
                    "type": {"const": "Feature"},
                    "geometry": {
                        "type": "object",
                        "required": ["type", "coordinates"],
                        "properties": {
                            "type": {"const": "LineString"},
                            "coordinates": {
                                "type": "array",
                                "minItems": 3,
                                "items": {"type": "array", "minItems": 2, "maxItems": 2, "items": _NUM},
                            },
                        },
                    },
                    "properties": {
                        "type": "object",
                        "required": ["uav_id", "distance_m", "savings", "deliveries"],
                        "properties": {
                            "uav_id": _INT,
                            "distance_m": _NUM,
                            "energy_joule": _NUM,
                            "savings": _NUM,
                            "deliveries": {
                                "type": "array",
                                "items": {
                                    "type": "object",
                                    "required": ["customer", "arrival_s", "discount"],
                                    "properties": {"customer": _INT, "arrival_s": _NUM,
                                                   "arrival_min": _NUM, "discount": _NUM},
                                },
                            },
                        },
                    },
                },
            },
        },
    },
}

SUMMARY = {
    "type": "object",
    "required": ["n_customers", "instance_hash", "mode", "status", "uav_count", "total_distance_m",
                 "total_savings", "rounds_used", "per_round_coverage", "manifest"],
    "properties": {
        "n_customers": _INT,
        "instance_hash": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
        "mode": {"enum": ["coordinated", "uncoordinated"]},
        "status": {"enum": ["complete", "partial"]},
        "uav_count": _INT,
        "total_distance_m": _NUM,
        "total_savings": _NUM,
        "rounds_used": _INT,
        "per_round_coverage": {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 1}},
        "manifest": {"type": "string"},
    },
}

MANIFEST = {
    "type": "object",
    "required": ["tool", "version", "command", "instance_hash", "config", "seeds", "timings_s", "outputs"],
    "properties": {
        "config": {"type": "object"},
        "seeds": {"type": "object"},
        "timings_s": {"type": "object", "additionalProperties": _NUM},
        "outputs": {"type": "array", "items": {"type": "string"}},
    },
}

SERIES = {
    "type": "object",
    "required": ["n", "savings_diff_mean", "uav_diff_mean", "x_scale"],
    "properties": {
        "n": {"type": "array", "items": _INT},
        "savings_diff_mean": {"type": "array", "items": _NUM},
        "uav_diff_mean": {"type": "array", "items": _NUM},
        "x_scale": {"const": "log"},
    },
}

ROUTE_TABLE_COLUMNS = ("uav_id", "round", "n_stops", "stops", "payload_kg", "distance_m", "energy_joule", "savings")
BENCH_COLUMNS = ("n", "k", "iterations", "seed", "status", "plan_s", "select_s", "resolve_s", "total_s",
                 "final_global_cost", "first_pass_coverage", "coverage", "uav_count", "rounds")


def validate(doc, schema) -> None:
    jsonschema.validate(doc, schema)
