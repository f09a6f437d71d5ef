//! JSON file formats shared by the command line and the HTTP service.
//!
//! Parsing happens in two passes. Syntax and shape errors carry the
//! line and column of the offending token; semantic checks run afterwards
//! and report every violated invariant with a JSON-style field path.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::inverse::{InverseSolution, SearchStats};
use crate::model::{
    validate_instance, Allocation, ObjectiveWeights, Pair, ParamBounds, ProblemInstance,
    RawInstance, RiskParams, Suggestion,
};
use crate::oracle::{GridSpec, OracleResult};

/// A problem instance together with the optional solver settings that may
/// travel with it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(flatten)]
    pub instance: ProblemInstance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<RiskParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<ParamBounds>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<ObjectiveWeights>,
}

impl InstanceFile {
    pub fn new(instance: ProblemInstance) -> Self {
        Self {
            instance,
            params: None,
            bounds: None,
            weights: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuggestionFile {
    pub pairs: Vec<Pair>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InputError {
    /// The text is not JSON of the expected shape.
    Malformed {
        line: usize,
        column: usize,
        message: String,
    },
    /// Well-formed input that breaks a domain invariant.
    Invalid(Vec<FieldError>),
}

impl InputError {
    fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Invalid(vec![FieldError {
            field: field.into(),
            message: message.into(),
        }])
    }
}

impl From<serde_json::Error> for InputError {
    fn from(e: serde_json::Error) -> Self {
        let message = e.to_string();
        // serde_json appends " at line L column C"; keep only the cause.
        let message = message
            .rsplit_once(" at line ")
            .map_or(message.clone(), |(head, _)| head.to_string());
        Self::Malformed {
            line: e.line(),
            column: e.column(),
            message,
        }
    }
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Malformed {
                line,
                column,
                message,
            } => write!(f, "{line}:{column}: {message}"),
            Self::Invalid(errors) => {
                let parts: Vec<String> = errors.iter().map(ToString::to_string).collect();
                write!(f, "{}", parts.join("; "))
            }
        }
    }
}

impl std::error::Error for InputError {}

#[derive(Deserialize)]
struct InstanceDoc {
    #[serde(flatten)]
    raw: RawInstance,
    #[serde(default)]
    params: Option<Value>,
    #[serde(default)]
    bounds: Option<Value>,
    #[serde(default)]
    weights: Option<Value>,
}

fn typed<T: for<'de> Deserialize<'de>>(
    field: &str,
    value: Option<Value>,
    errors: &mut Vec<FieldError>,
) -> Option<T> {
    match serde_json::from_value(value?) {
        Ok(v) => Some(v),
        Err(e) => {
            errors.push(FieldError {
                field: field.into(),
                message: e.to_string(),
            });
            None
        }
    }
}

pub fn parse_instance_file(text: &str) -> Result<InstanceFile, InputError> {
    let doc: InstanceDoc = serde_json::from_str(text)?;
    instance_file_from_parts(doc.raw, doc.params, doc.bounds, doc.weights)
}

/// Validates already-split instance fields, collecting every violation.
pub fn instance_file_from_parts(
    raw: RawInstance,
    params: Option<Value>,
    bounds: Option<Value>,
    weights: Option<Value>,
) -> Result<InstanceFile, InputError> {
    let mut errors: Vec<FieldError> = validate_instance(&raw)
        .into_iter()
        .map(|v| FieldError {
            field: v.field,
            message: v.rule.to_string(),
        })
        .collect();
    let params = typed::<RiskParams>("params", params, &mut errors);
    let bounds = typed::<ParamBounds>("bounds", bounds, &mut errors);
    let weights = typed::<ObjectiveWeights>("weights", weights, &mut errors);
    if !errors.is_empty() {
        return Err(InputError::Invalid(errors));
    }
    let instance = ProblemInstance::try_from(raw).expect("validated above");
    Ok(InstanceFile {
        instance,
        params,
        bounds,
        weights,
    })
}

pub fn parse_suggestion_file(
    text: &str,
    instance: &ProblemInstance,
) -> Result<Suggestion, InputError> {
    let doc: SuggestionFile = serde_json::from_str(text)?;
    check_suggestion(instance, doc.pairs)
}

/// Builds a suggestion, reporting each offending entry as `pairs[k]`.
pub fn check_suggestion(
    instance: &ProblemInstance,
    pairs: Vec<Pair>,
) -> Result<Suggestion, InputError> {
    if pairs.is_empty() {
        return Err(InputError::invalid(
            "pairs",
            "suggestion must contain at least one pair",
        ));
    }
    let mut errors = Vec::new();
    for (k, &(i, j)) in pairs.iter().enumerate() {
        let field = format!("pairs[{k}]");
        if i >= instance.n_robots() {
            errors.push(FieldError {
                field: field.clone(),
                message: format!("robot {i} out of range"),
            });
        }
        if j >= instance.n_targets() {
            errors.push(FieldError {
                field: field.clone(),
                message: format!("target {j} out of range"),
            });
        }
        if pairs[..k].iter().any(|&(r, _)| r == i) {
            errors.push(FieldError {
                field: field.clone(),
                message: format!("robot {i} assigned twice"),
            });
        }
        if pairs[..k].iter().any(|&(_, t)| t == j) {
            errors.push(FieldError {
                field,
                message: format!("target {j} assigned twice"),
            });
        }
    }
    if !errors.is_empty() {
        return Err(InputError::Invalid(errors));
    }
    Ok(Suggestion::new(instance, pairs).expect("validated above"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridStats {
    pub evaluated: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ResultStats {
    Search(SearchStats),
    Grid(GridStats),
}

/// Recovered parameters as written by `inverse` and `oracle`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultFile {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub objective: f64,
    pub epsilon: f64,
    pub ordering: Vec<Pair>,
    pub verified: bool,
    pub stats: ResultStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
}

impl ResultFile {
    pub fn from_inverse(solution: &InverseSolution) -> Self {
        Self {
            alpha: solution.params.alpha(),
            beta: solution.params.beta(),
            delta: solution.params.delta(),
            objective: solution.objective,
            epsilon: solution.epsilon,
            ordering: solution.ordering.pairs().to_vec(),
            verified: solution.verified,
            stats: ResultStats::Search(solution.stats.clone()),
            grid: None,
        }
    }

    /// `ordering` is the greedy pick order at the grid optimum; the epsilon
    /// reported is the grid's weighted half-cell.
    pub fn from_oracle(result: &OracleResult, ordering: &Allocation, verified: bool) -> Self {
        Self {
            alpha: result.params.alpha(),
            beta: result.params.beta(),
            delta: result.params.delta(),
            objective: result.objective,
            epsilon: result.slack,
            ordering: ordering.pairs().to_vec(),
            verified,
            stats: ResultStats::Grid(GridStats {
                evaluated: result.evaluated,
            }),
            grid: Some(result.grid),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{"n_r": 1, "n_t": 2, "rewards": [[1.0, 2.0]], "probs": [[0.5, 0.9]]}"#;

    #[test]
    fn parses_bare_instance() {
        let f = parse_instance_file(SMALL).unwrap();
        assert_eq!(f.instance.prob(0, 1), 0.9);
        assert!(f.params.is_none() && f.bounds.is_none() && f.weights.is_none());
    }

    #[test]
    fn syntax_errors_have_positions() {
        let err = parse_instance_file("{\n  \"n_r\": 1,\n  \"n_t\": ]\n}").unwrap_err();
        match err {
            InputError::Malformed { line, column, .. } => assert_eq!((line, column), (3, 10)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_instance_file(r#"{"n_r": 1}"#),
            Err(InputError::Malformed { .. })
        ));
    }

    #[test]
    fn invariant_errors_collect_paths() {
        let text = r#"{"n_r": 1, "n_t": 2, "rewards": [[1.0, -2.0]], "probs": [[1.0, 0.9]],
                      "params": {"alpha": 0.0, "beta": 1.0, "delta": 0.8}}"#;
        let InputError::Invalid(errs) = parse_instance_file(text).unwrap_err() else {
            panic!()
        };
        let fields: Vec<&str> = errs.iter().map(|e| e.field.as_str()).collect();
        assert_eq!(fields, ["rewards[0][1]", "probs[0][0]", "params"]);
        assert_eq!(errs[1].message, "p strictly < 1");
    }

    #[test]
    fn suggestion_paths() {
        let inst = parse_instance_file(SMALL).unwrap().instance;
        assert_eq!(
            parse_suggestion_file(r#"{"pairs": [[0, 1]]}"#, &inst)
                .unwrap()
                .pairs(),
            &[(0, 1)]
        );
        let InputError::Invalid(errs) =
            parse_suggestion_file(r#"{"pairs": [[0, 0], [0, 3]]}"#, &inst).unwrap_err()
        else {
            panic!()
        };
        assert!(errs.iter().all(|e| e.field == "pairs[1]"));
        assert_eq!(errs.len(), 2);
        assert!(matches!(
            parse_suggestion_file(r#"{"pairs": []}"#, &inst),
            Err(InputError::Invalid(_))
        ));
        assert!(matches!(
            parse_suggestion_file(r#"{"pairs": [[0]]}"#, &inst),
            Err(InputError::Malformed { .. })
        ));
    }

    #[test]
    fn instance_file_round_trip() {
        let text = crate::scenario::qualitative_fixture_json();
        let f = parse_instance_file(text).unwrap();
        let back = parse_instance_file(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(f, back);
    }
}
