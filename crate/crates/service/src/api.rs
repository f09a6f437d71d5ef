//! Request and response bodies and the endpoint handlers.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::Json;
use irmrta::forward::{greedy_solve, verify_forward, GreedyTrace};
use irmrta::inverse::{solve_inverse, InverseConfig, InverseError, InverseSolution, SearchStats};
use irmrta::io::check_suggestion;
use irmrta::model::{
    prelec_weight, validate_instance, Interval, ObjectiveWeights, Pair, ParamBounds,
    ProblemInstance, RawInstance, RiskParams,
};
use irmrta::scenario::{
    derived_geometry, generate_scenario, load_fixture_qualitative, Geometry, ScenarioConfig,
};
use irmrta::ModelError;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::ApiError;
use crate::AppState;

/// Nominal parameters assumed when a request names none: rational
/// perception with a 0.8 survival threshold.
pub const DEFAULT_NOMINAL: (f64, f64, f64) = (1.0, 1.0, 0.8);
/// Largest robot or target count the scenario endpoint generates.
pub const MAX_SCENARIO_SIDE: usize = 64;
pub const CURVE_POINTS: usize = 101;
const DEFAULT_DEPTH: u32 = 8;

#[derive(Debug, Clone, Serialize)]
pub struct SessionScenario {
    pub scenario_id: String,
    pub instance: ProblemInstance,
    pub geometry: Geometry,
    /// `generated` for random scenes, `derived` when the layout was fitted
    /// to a fixed instance.
    pub layout: &'static str,
    pub nominal: RiskParams,
    pub weights: ObjectiveWeights,
    pub bounds: ParamBounds,
}

#[derive(Deserialize)]
struct PlainParams {
    alpha: f64,
    beta: f64,
    delta: f64,
}

#[derive(Deserialize)]
struct PlainWeights {
    w_alpha: f64,
    w_beta: f64,
    w_delta: f64,
}

#[derive(Deserialize)]
struct PlainBounds {
    alpha: [f64; 2],
    beta: [f64; 2],
    delta: [f64; 2],
}

#[derive(Deserialize)]
struct ForwardRequest {
    instance: Option<Value>,
    scenario_id: Option<String>,
    params: PlainParams,
}

#[derive(Deserialize)]
struct InverseRequest {
    instance: Option<Value>,
    scenario_id: Option<String>,
    suggestion: Vec<Pair>,
    nominal: Option<PlainParams>,
    weights: Option<PlainWeights>,
    bounds: Option<PlainBounds>,
    depth: Option<u32>,
    epsilon: Option<f64>,
    #[serde(default)]
    strict_stop: bool,
}

#[derive(Serialize)]
pub struct ForwardResponse {
    pub allocation: Vec<Pair>,
    pub trace: GreedyTrace,
    pub budget_used: f64,
}

/// Search statistics without wall time, so identical requests produce
/// identical bytes.
#[derive(Serialize)]
pub struct StatsBody {
    pub nodes_expanded: usize,
    pub subproblems_solved: usize,
    pub pruned_infeasible: usize,
    pub pruned_bound: usize,
    pub peak_tree_size: usize,
}

impl From<&SearchStats> for StatsBody {
    fn from(s: &SearchStats) -> Self {
        Self {
            nodes_expanded: s.nodes_expanded,
            subproblems_solved: s.subproblems_solved,
            pruned_infeasible: s.pruned_infeasible,
            pruned_bound: s.pruned_bound,
            peak_tree_size: s.peak_tree_size,
        }
    }
}

/// Prelec curves sampled at evenly spaced probabilities.
#[derive(Serialize)]
pub struct Curves {
    pub p: Vec<f64>,
    pub nominal: Vec<f64>,
    pub recovered: Vec<f64>,
}

#[derive(Serialize)]
pub struct InverseBody {
    /// `ok`, or `unverified` when the greedy at the recovered parameters
    /// does not reproduce the suggestion.
    pub status: &'static str,
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub objective: f64,
    pub epsilon: f64,
    pub ordering: Vec<Pair>,
    pub verified: bool,
    /// Greedy output at the recovered parameters.
    pub reproduced: Vec<Pair>,
    pub stats: StatsBody,
    pub curves: Curves,
}

#[derive(Serialize)]
struct FailureBody {
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    partial: Option<Option<InverseBody>>,
    stats: StatsBody,
}

fn field_of(prefix: &str, e: &ModelError) -> String {
    match e.field_name() {
        Some(name) => format!("{prefix}.{name}"),
        None => prefix.to_string(),
    }
}

fn model_error(prefix: &str, e: ModelError) -> ApiError {
    ApiError::invalid(field_of(prefix, &e), e)
}

fn to_params(prefix: &str, p: PlainParams) -> Result<RiskParams, ApiError> {
    RiskParams::new(p.alpha, p.beta, p.delta).map_err(|e| model_error(prefix, e))
}

fn resolve_instance(
    state: &AppState,
    instance: Option<Value>,
    scenario_id: Option<String>,
) -> Result<(ProblemInstance, Option<Arc<SessionScenario>>), ApiError> {
    match (instance, scenario_id) {
        (Some(_), Some(_)) => Err(ApiError::malformed(
            "give either `instance` or `scenario_id`, not both",
        )),
        (None, None) => Err(ApiError::malformed(
            "missing field `instance` or `scenario_id`",
        )),
        (None, Some(id)) => {
            let sc = state
                .registry
                .get(&id)
                .ok_or_else(|| ApiError::NotFound(format!("unknown scenario_id `{id}`")))?;
            Ok((sc.instance.clone(), Some(sc)))
        }
        (Some(v), None) => {
            let raw: RawInstance = serde_json::from_value(v)
                .map_err(|e| ApiError::malformed(format!("instance: {e}")))?;
            let violations = validate_instance(&raw);
            if !violations.is_empty() {
                return Err(ApiError::Invalid(
                    violations
                        .into_iter()
                        .map(|v| irmrta::io::FieldError {
                            field: format!("instance.{}", v.field),
                            message: v.rule.into(),
                        })
                        .collect(),
                ));
            }
            Ok((
                ProblemInstance::try_from(raw).expect("validated above"),
                None,
            ))
        }
    }
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> Result<T, ApiError> {
    Ok(serde_json::from_slice(body)?)
}

pub async fn forward(
    State(state): State<Arc<AppState>>,
    body: Bytes,
) -> Result<Json<ForwardResponse>, ApiError> {
    let req: ForwardRequest = parse_body(&body)?;
    let (instance, _) = resolve_instance(&state, req.instance, req.scenario_id)?;
    let params = to_params("params", req.params)?;
    let (alloc, trace) = greedy_solve(&instance, &params);
    Ok(Json(ForwardResponse {
        allocation: alloc.pairs().to_vec(),
        budget_used: trace.budget_used(),
        trace,
    }))
}

fn curve(params: &RiskParams) -> Vec<f64> {
    (0..CURVE_POINTS)
        .map(|k| prelec_weight(k as f64 / (CURVE_POINTS - 1) as f64, params).expect("p in [0, 1]"))
        .collect()
}

fn inverse_body(
    instance: &ProblemInstance,
    nominal: &RiskParams,
    sol: &InverseSolution,
) -> InverseBody {
    let suggestion =
        irmrta::Suggestion::from_allocation(&sol.ordering).expect("orderings are non-empty");
    let check = verify_forward(instance, &sol.params, &suggestion);
    InverseBody {
        status: if sol.verified { "ok" } else { "unverified" },
        alpha: sol.params.alpha(),
        beta: sol.params.beta(),
        delta: sol.params.delta(),
        objective: sol.objective,
        epsilon: sol.epsilon,
        ordering: sol.ordering.pairs().to_vec(),
        verified: sol.verified,
        reproduced: check.produced.pairs().to_vec(),
        stats: (&sol.stats).into(),
        curves: Curves {
            p: (0..CURVE_POINTS)
                .map(|k| k as f64 / (CURVE_POINTS - 1) as f64)
                .collect(),
            nominal: curve(nominal),
            recovered: curve(&sol.params),
        },
    }
}

pub async fn inverse(
    State(state): State<Arc<AppState>>,
    body: Bytes,
) -> Result<Json<Value>, ApiError> {
    let req: InverseRequest = parse_body(&body)?;
    let (instance, scenario) = resolve_instance(&state, req.instance, req.scenario_id)?;
    let suggestion = check_suggestion(&instance, req.suggestion)
        .map_err(|e| ApiError::from_input("suggestion", e))?;
    let nominal = match req.nominal {
        Some(p) => to_params("nominal", p)?,
        None => match &scenario {
            Some(sc) => sc.nominal,
            None => RiskParams::new(DEFAULT_NOMINAL.0, DEFAULT_NOMINAL.1, DEFAULT_NOMINAL.2)
                .expect("valid default"),
        },
    };
    let weights = match req.weights {
        Some(w) => ObjectiveWeights::new(w.w_alpha, w.w_beta, w.w_delta)
            .map_err(|e| model_error("weights", e))?,
        None => scenario
            .as_ref()
            .map_or_else(ObjectiveWeights::default, |sc| sc.weights),
    };
    let bounds = match req.bounds {
        Some(b) => ParamBounds::new(
            Interval::new(b.alpha[0], b.alpha[1]),
            Interval::new(b.beta[0], b.beta[1]),
            Interval::new(b.delta[0], b.delta[1]),
        )
        .map_err(|e| model_error("bounds", e))?,
        None => scenario
            .as_ref()
            .map_or_else(ParamBounds::default, |sc| sc.bounds),
    };
    if !bounds.contains(&nominal) {
        return Err(ApiError::invalid("nominal", ModelError::NominalOutOfBounds));
    }
    let depth = req.depth.unwrap_or(DEFAULT_DEPTH);
    if depth < 2 {
        return Err(ApiError::invalid("depth", ModelError::InvalidDepth(depth)));
    }
    if let Some(e) = req.epsilon {
        if !(e.is_finite() && e >= 0.0) {
            return Err(ApiError::invalid(
                "epsilon",
                "epsilon must be finite and non-negative",
            ));
        }
    }

    let permit = state
        .workers
        .clone()
        .acquire_owned()
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))?;
    let budget = state.config.time_budget;
    let strict_stop = req.strict_stop;
    let epsilon = req.epsilon;
    let outcome = tokio::task::spawn_blocking(move || {
        let _permit = permit;
        let config = InverseConfig {
            max_depth: depth,
            epsilon,
            strict_stop,
            deadline: Some(Instant::now() + budget),
            record_edges: false,
        };
        let result = solve_inverse(&instance, &suggestion, &nominal, &weights, &bounds, &config);
        (instance, result)
    })
    .await
    .map_err(|e| ApiError::Internal(e.to_string()))?;

    let (instance, result) = outcome;
    match result {
        Ok(sol) => Ok(Json(json(&inverse_body(&instance, &nominal, &sol)))),
        Err(InverseError::Infeasible { stats }) => Ok(Json(json(&FailureBody {
            status: "infeasible",
            partial: None,
            stats: (&stats).into(),
        }))),
        Err(InverseError::TimedOut { partial, stats }) => {
            Err(ApiError::TimedOut(json(&FailureBody {
                status: "timed_out",
                partial: Some(partial.map(|p| inverse_body(&instance, &nominal, &p))),
                stats: (&stats).into(),
            })))
        }
        Err(InverseError::Model(e)) => Err(model_error("request", e)),
    }
}

fn json<T: Serialize>(body: &T) -> Value {
    serde_json::to_value(body).expect("response bodies serialize")
}

fn query_number<T: std::str::FromStr>(
    q: &HashMap<String, String>,
    key: &str,
) -> Result<Option<T>, ApiError> {
    q.get(key)
        .map(|v| {
            v.parse::<T>().map_err(|_| {
                ApiError::malformed(format!(
                    "query parameter `{key}` must be a non-negative integer"
                ))
            })
        })
        .transpose()
}

pub async fn scenario(
    State(state): State<Arc<AppState>>,
    Query(q): Query<HashMap<String, String>>,
) -> Result<Json<Arc<SessionScenario>>, ApiError> {
    if let Some(name) = q.get("fixture") {
        if name != "qualitative" {
            return Err(ApiError::malformed(format!("unknown fixture `{name}`")));
        }
        let sc = state
            .registry
            .get_or_insert::<ApiError>("fixture-qualitative", || {
                let fx = load_fixture_qualitative();
                Ok(SessionScenario {
                    scenario_id: "fixture-qualitative".into(),
                    geometry: derived_geometry(&fx.instance, ScenarioConfig::default().k),
                    instance: fx.instance,
                    layout: "derived",
                    nominal: fx.nominal,
                    weights: fx.weights,
                    bounds: fx.bounds,
                })
            })?;
        return Ok(Json(sc));
    }
    let robots: usize = query_number(&q, "robots")?
        .ok_or_else(|| ApiError::malformed("missing query parameter `robots`"))?;
    let targets: usize = query_number(&q, "targets")?
        .ok_or_else(|| ApiError::malformed("missing query parameter `targets`"))?;
    let seed: u64 = query_number(&q, "seed")?.unwrap_or(0);
    for (key, n) in [("robots", robots), ("targets", targets)] {
        if n == 0 || n > MAX_SCENARIO_SIDE {
            return Err(ApiError::malformed(format!(
                "`{key}` must be between 1 and {MAX_SCENARIO_SIDE}"
            )));
        }
    }
    let id = format!("seed-{seed}-{robots}x{targets}");
    let sc = state.registry.get_or_insert::<ApiError>(&id, || {
        let generated = generate_scenario(&ScenarioConfig::new(robots, targets, seed))
            .map_err(|e| ApiError::Internal(e.to_string()))?;
        Ok(SessionScenario {
            scenario_id: id.clone(),
            instance: generated.instance,
            geometry: generated.geometry,
            layout: "generated",
            nominal: RiskParams::new(DEFAULT_NOMINAL.0, DEFAULT_NOMINAL.1, DEFAULT_NOMINAL.2)
                .expect("valid default"),
            weights: ObjectiveWeights::default(),
            bounds: ParamBounds::default(),
        })
    })?;
    Ok(Json(sc))
}

pub async fn spec() -> Json<Value> {
    Json(crate::openapi::document())
}
