use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid angle {0}: expected a value in (0, pi)")]
    InvalidAngle(f64),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("degenerate triple: all three points coincide")]
    DegenerateTriple,
    #[error("circles are not exterior: |c1 - c2| = {distance} <= r1 + r2 = {radii}")]
    CirclesNotExterior { distance: f64, radii: f64 },
    #[error("need at least 3 points, got {0}")]
    SizeTooSmall(usize),
    #[error("{n} points exceeds the configured maximum of {max}")]
    SizeTooLarge { n: usize, max: usize },
    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("empty score sample")]
    EmptySample,
    #[error("triple sample touches all but {remaining} nodes; at least 3 must remain")]
    SampleExhaustsNodes { remaining: usize },
    #[error("cluster {0} has fewer than 2 points")]
    EmptyCluster(u8),
    #[error("sigma must be positive for a density")]
    ZeroSigma,
    #[error("`{bound}` is only valid when {condition}")]
    OutOfValidity { bound: &'static str, condition: &'static str },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("label value {value} at index {index} is not 1 or 2")]
    BadLabel { index: usize, value: u8 },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
