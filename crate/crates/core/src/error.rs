use thiserror::Error;

/// Errors produced while building or evaluating objects on a finite metric measure space.
#[derive(Debug, Error)]
pub enum Error {
    #[error("not a metric at ({i}, {j}, {k}): {reason}")]
    NonMetric {
        i: usize,
        j: usize,
        k: usize,
        reason: String,
    },
    #[error("exponent p = {0} is not in [1, inf]")]
    InvalidP(f64),
    #[error("measure has empty support")]
    EmptySupport,
    #[error("anchor point {0} is not in the support of the measure")]
    AnchorOffSupport(usize),
    #[error("radius list is empty")]
    EmptyRadii,
    #[error("radii must be strictly decreasing (index {0})")]
    NonDecreasingRadii(usize),
    #[error("no radius isolates support points: need r below the minimum support gap {min_gap}")]
    RadiiTooCoarse { min_gap: f64 },
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("verification selection is empty")]
    EmptySelection,
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
