use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use irmrta::io::{FieldError, InputError};
use serde::Serialize;
use serde_json::Value;

/// Every non-200 outcome of the API.
#[derive(Debug)]
pub enum ApiError {
    /// Body or query is not the expected JSON shape.
    Malformed {
        message: String,
        line: Option<usize>,
        column: Option<usize>,
    },
    NotFound(String),
    /// Well-formed input that breaks a domain invariant.
    Invalid(Vec<FieldError>),
    /// Time budget exhausted; carries the partial result body.
    TimedOut(Value),
    Internal(String),
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: &'a str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    column: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    violations: Vec<FieldError>,
}

impl ApiError {
    pub fn malformed(message: impl Into<String>) -> Self {
        Self::Malformed {
            message: message.into(),
            line: None,
            column: None,
        }
    }

    pub fn invalid(field: impl Into<String>, message: impl ToString) -> Self {
        Self::Invalid(vec![FieldError {
            field: field.into(),
            message: message.to_string(),
        }])
    }

    /// Re-roots field paths of a nested document under `prefix`.
    pub fn from_input(prefix: &str, err: InputError) -> Self {
        match err {
            InputError::Malformed {
                line,
                column,
                message,
            } => Self::Malformed {
                message: format!("{prefix}: {message}"),
                line: Some(line),
                column: Some(column),
            },
            InputError::Invalid(errors) => Self::Invalid(
                errors
                    .into_iter()
                    .map(|e| FieldError {
                        field: join_path(prefix, &e.field),
                        message: e.message,
                    })
                    .collect(),
            ),
        }
    }
}

/// `join_path("suggestion", "pairs[1]") == "suggestion[1]"`,
/// `join_path("instance", "probs[0][0]") == "instance.probs[0][0]"`.
fn join_path(prefix: &str, field: &str) -> String {
    match field.strip_prefix("pairs") {
        Some(rest) if prefix == "suggestion" => format!("{prefix}{rest}"),
        _ => format!("{prefix}.{field}"),
    }
}

impl From<serde_json::Error> for ApiError {
    fn from(e: serde_json::Error) -> Self {
        match InputError::from(e) {
            InputError::Malformed {
                line,
                column,
                message,
            } => Self::Malformed {
                message,
                line: Some(line),
                column: Some(column),
            },
            InputError::Invalid(v) => Self::Invalid(v),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, body) = match self {
            Self::Malformed {
                message,
                line,
                column,
            } => (
                StatusCode::BAD_REQUEST,
                ErrorBody {
                    error: "malformed",
                    message,
                    line,
                    column,
                    violations: vec![],
                },
            ),
            Self::NotFound(message) => (
                StatusCode::NOT_FOUND,
                ErrorBody {
                    error: "not_found",
                    message,
                    line: None,
                    column: None,
                    violations: vec![],
                },
            ),
            Self::Invalid(violations) => {
                let message = violations
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("; ");
                (
                    StatusCode::UNPROCESSABLE_ENTITY,
                    ErrorBody {
                        error: "invalid",
                        message,
                        line: None,
                        column: None,
                        violations,
                    },
                )
            }
            Self::TimedOut(body) => {
                return (StatusCode::SERVICE_UNAVAILABLE, Json(body)).into_response()
            }
            Self::Internal(message) => (
                StatusCode::INTERNAL_SERVER_ERROR,
                ErrorBody {
                    error: "internal",
                    message,
                    line: None,
                    column: None,
                    violations: vec![],
                },
            ),
        };
        (status, Json(body)).into_response()
    }
}
