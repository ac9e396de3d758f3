//! Crate-wide error type.
//!
//! Guard violations (dimension limits, non-isotropic inputs, an empty
//! testing gap, malformed state files) are reported as structured errors so
//! the CLI can render them as JSON and exit with a distinct status code.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("subspace dimension {dim} exceeds enumeration guard {max}")]
    EnumerationGuard { dim: usize, max: usize },

    #[error("qubit count {n} exceeds dense-operator guard {max}")]
    DenseGuard { n: usize, max: usize },

    #[error("total qubit count n*t = {nt} exceeds operator guard {max}")]
    OperatorGuard { nt: usize, max: usize },

    #[error("input basis is not isotropic: [{x}, {y}] = 1")]
    NotIsotropic { x: String, y: String },

    #[error("state vector has norm {norm} (must be 1 within {tol})")]
    NotNormalized { norm: f64, tol: f64 },

    #[error("state has {len} amplitudes, expected 2^{n}")]
    AmplitudeCount { len: usize, n: usize },

    #[error("state is on {actual} qubits but {expected} were requested")]
    QubitMismatch { actual: usize, expected: usize },

    #[error(
        "testing gap {gap:.6} is not positive at n = {n}, epsilon = {epsilon}; \
         the guarantee needs epsilon > 2^-n / Q(n,1) = {min_epsilon:.6}"
    )]
    GapNonPositive {
        n: usize,
        epsilon: f64,
        gap: f64,
        min_epsilon: f64,
    },

    #[error("parameter {name} = {value} outside valid range {range}")]
    ParamRange {
        name: &'static str,
        value: String,
        range: String,
    },

    #[error("cannot parse {what}: {input}")]
    Parse { what: &'static str, input: String },

    #[error(
        "subspace is not the graph of an orthogonal map (second-half projection is rank-deficient)"
    )]
    NotOrthogonalGraph,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
