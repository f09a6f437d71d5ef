use serde_json::{json, Value};

/// OpenAPI 3 description of the API, served at `/api/v1/spec`.
pub fn document() -> Value {
    let pair = json!({"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 2, "maxItems": 2});
    let pairs = json!({"type": "array", "items": pair});
    let interval =
        json!({"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2});
    let error = json!({"$ref": "#/components/schemas/Error"});
    let failures = |extra: Value| {
        let mut map = json!({
            "400": {"description": "Malformed body", "content": {"application/json": {"schema": error}}},
            "404": {"description": "Unknown scenario_id", "content": {"application/json": {"schema": error}}},
            "422": {"description": "Invariant violation", "content": {"application/json": {"schema": error}}},
        });
        if let (Value::Object(m), Value::Object(e)) = (&mut map, extra) {
            m.extend(e);
        }
        map
    };
    let mut inverse_responses = failures(json!({
        "503": {
            "description": "Time budget exhausted; `partial` holds the best result found, or null",
            "content": {"application/json": {"schema": {"$ref": "#/components/schemas/InverseFailure"}}}
        }
    }));
    inverse_responses["200"] = json!({
        "description": "Recovered parameters, or `{status: infeasible}`",
        "content": {"application/json": {"schema": {"oneOf": [
            {"$ref": "#/components/schemas/InverseResult"},
            {"$ref": "#/components/schemas/InverseFailure"}
        ]}}}
    });
    let mut forward_responses = failures(json!({}));
    forward_responses["200"] = json!({
        "description": "Greedy allocation and trace",
        "content": {"application/json": {"schema": {"$ref": "#/components/schemas/ForwardResult"}}}
    });

    json!({
        "openapi": "3.0.3",
        "info": {
            "title": "irmrta",
            "version": env!("CARGO_PKG_VERSION"),
            "description": "Risk-sensitive task allocation: forward greedy, inverse parameter recovery and scenario provisioning."
        },
        "paths": {
            "/api/v1/forward": {"post": {
                "summary": "Run the greedy allocation under given risk parameters",
                "requestBody": {"required": true, "content": {"application/json": {"schema": {"$ref": "#/components/schemas/ForwardRequest"}}}},
                "responses": forward_responses
            }},
            "/api/v1/inverse": {"post": {
                "summary": "Recover the risk parameters closest to a nominal guess that reproduce a suggestion",
                "requestBody": {"required": true, "content": {"application/json": {"schema": {"$ref": "#/components/schemas/InverseRequest"}}}},
                "responses": inverse_responses
            }},
            "/api/v1/scenario": {"get": {
                "summary": "Create or fetch a scenario",
                "parameters": [
                    {"name": "robots", "in": "query", "schema": {"type": "integer", "minimum": 1, "maximum": crate::api::MAX_SCENARIO_SIDE}},
                    {"name": "targets", "in": "query", "schema": {"type": "integer", "minimum": 1, "maximum": crate::api::MAX_SCENARIO_SIDE}},
                    {"name": "seed", "in": "query", "schema": {"type": "integer", "minimum": 0, "default": 0}},
                    {"name": "fixture", "in": "query", "schema": {"type": "string", "enum": ["qualitative"]}}
                ],
                "responses": {
                    "200": {"description": "Scenario payload", "content": {"application/json": {"schema": {"$ref": "#/components/schemas/Scenario"}}}},
                    "400": {"description": "Invalid query", "content": {"application/json": {"schema": error}}}
                }
            }},
            "/api/v1/spec": {"get": {
                "summary": "This document",
                "responses": {"200": {"description": "OpenAPI document"}}
            }}
        },
        "components": {"schemas": {
            "Pair": pair,
            "Params": {"type": "object", "required": ["alpha", "beta", "delta"], "properties": {
                "alpha": {"type": "number", "exclusiveMinimum": 0},
                "beta": {"type": "number", "exclusiveMinimum": 0},
                "delta": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1}
            }},
            "Weights": {"type": "object", "required": ["w_alpha", "w_beta", "w_delta"], "properties": {
                "w_alpha": {"type": "number", "minimum": 0},
                "w_beta": {"type": "number", "minimum": 0},
                "w_delta": {"type": "number", "minimum": 0}
            }},
            "Bounds": {"type": "object", "required": ["alpha", "beta", "delta"], "properties": {
                "alpha": interval, "beta": interval, "delta": interval
            }},
            "Instance": {"type": "object", "required": ["n_r", "n_t", "rewards", "probs"], "properties": {
                "n_r": {"type": "integer", "minimum": 1},
                "n_t": {"type": "integer", "minimum": 1},
                "rewards": {"type": "array", "items": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}}},
                "probs": {"type": "array", "items": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1}}}
            }},
            "ForwardRequest": {"type": "object", "required": ["params"], "properties": {
                "instance": {"$ref": "#/components/schemas/Instance"},
                "scenario_id": {"type": "string"},
                "params": {"$ref": "#/components/schemas/Params"}
            }, "description": "Exactly one of `instance` and `scenario_id`."},
            "ForwardResult": {"type": "object", "properties": {
                "allocation": pairs,
                "trace": {"type": "object", "properties": {
                    "steps": {"type": "array", "items": {"type": "object", "properties": {
                        "pair": pair, "score": {"type": "number"}, "cost": {"type": "number"}, "cumulative_cost": {"type": "number"}
                    }}},
                    "terminated_by": {"type": "string", "enum": ["budget_exhausted", "all_allocated"]},
                    "budget": {"type": "number"}
                }},
                "budget_used": {"type": "number"}
            }},
            "InverseRequest": {"type": "object", "required": ["suggestion"], "properties": {
                "instance": {"$ref": "#/components/schemas/Instance"},
                "scenario_id": {"type": "string"},
                "suggestion": pairs,
                "nominal": {"$ref": "#/components/schemas/Params"},
                "weights": {"$ref": "#/components/schemas/Weights"},
                "bounds": {"$ref": "#/components/schemas/Bounds"},
                "depth": {"type": "integer", "minimum": 2, "default": 8},
                "epsilon": {"type": "number", "minimum": 0},
                "strict_stop": {"type": "boolean", "default": false}
            }, "description": "Exactly one of `instance` and `scenario_id`. Missing nominal, weights and bounds fall back to the scenario's, then to (1, 1, 0.8), (1, 1, 20) and the default bounds."},
            "Stats": {"type": "object", "properties": {
                "nodes_expanded": {"type": "integer"},
                "subproblems_solved": {"type": "integer"},
                "pruned_infeasible": {"type": "integer"},
                "pruned_bound": {"type": "integer"},
                "peak_tree_size": {"type": "integer"}
            }},
            "InverseResult": {"type": "object", "properties": {
                "status": {"type": "string", "enum": ["ok", "unverified"]},
                "alpha": {"type": "number"},
                "beta": {"type": "number"},
                "delta": {"type": "number"},
                "objective": {"type": "number"},
                "epsilon": {"type": "number"},
                "ordering": pairs,
                "verified": {"type": "boolean"},
                "reproduced": pairs,
                "stats": {"$ref": "#/components/schemas/Stats"},
                "curves": {"type": "object", "properties": {
                    "p": {"type": "array", "items": {"type": "number"}, "minItems": crate::api::CURVE_POINTS, "maxItems": crate::api::CURVE_POINTS},
                    "nominal": {"type": "array", "items": {"type": "number"}},
                    "recovered": {"type": "array", "items": {"type": "number"}}
                }}
            }},
            "InverseFailure": {"type": "object", "properties": {
                "status": {"type": "string", "enum": ["infeasible", "timed_out"]},
                "partial": {"nullable": true, "allOf": [{"$ref": "#/components/schemas/InverseResult"}]},
                "stats": {"$ref": "#/components/schemas/Stats"}
            }},
            "Scenario": {"type": "object", "properties": {
                "scenario_id": {"type": "string"},
                "instance": {"$ref": "#/components/schemas/Instance"},
                "geometry": {"type": "object", "properties": {
                    "robot_positions": {"type": "array", "items": interval},
                    "target_positions": {"type": "array", "items": interval},
                    "robot_sizes": {"type": "array", "items": {"type": "number"}},
                    "target_sizes": {"type": "array", "items": {"type": "number"}}
                }},
                "layout": {"type": "string", "enum": ["generated", "derived"]},
                "nominal": {"$ref": "#/components/schemas/Params"},
                "weights": {"$ref": "#/components/schemas/Weights"},
                "bounds": {"$ref": "#/components/schemas/Bounds"}
            }},
            "Error": {"type": "object", "required": ["error", "message"], "properties": {
                "error": {"type": "string", "enum": ["malformed", "not_found", "invalid", "internal"]},
                "message": {"type": "string"},
                "line": {"type": "integer"},
                "column": {"type": "integer"},
                "violations": {"type": "array", "items": {"type": "object", "properties": {
                    "field": {"type": "string"}, "message": {"type": "string"}
                }}}
            }}
        }}
    })
}
