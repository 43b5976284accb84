use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error("{0}")]
    Parse(String),
}

impl GeometryError {
    pub(crate) fn invalid(field: &str, reason: &str) -> Self {
        GeometryError::Invalid {
            field: field.to_owned(),
            reason: reason.to_owned(),
        }
    }
}

/// Failures of the boundary-value solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("empty or reversed time window [{start}, {end}]")]
    EmptyWindow { start: f64, end: f64 },
    #[error("boundary system is singular (condition estimate {condition:.3e})")]
    Singular { condition: f64 },
    #[error("weight {0} is outside (0, 1); use the fuel-only (w = 1) or jerk-only (w = 0) solver")]
    DegenerateWeight(f64),
    #[error("normalisation factors must be positive (q1 = {q1}, q2 = {q2})")]
    BadNormalisation { q1: f64, q2: f64 },
    #[error("exponent rate times window {exponent:.1} exceeds the cap {cap:.1}")]
    ExponentOverflow { exponent: f64, cap: f64 },
    #[error("non-finite boundary data")]
    NonFinite,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("pareto sweep failed at w = {w}: {source}")]
    Sweep { w: f64, source: SolveError },
    #[error("invalid `{field}`: {reason}")]
    Config { field: String, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
