use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    // capacities
    #[error("ground set of size {0} exceeds the supported maximum of 20 points")]
    GroundSetTooLarge(usize),
    #[error("expected {expected} subset values, got {found}")]
    WrongValueCount { expected: usize, found: usize },
    #[error("capacity of the empty set must be 0, got {0}")]
    NonzeroEmptySet(f64),
    #[error("capacity is not monotone: value({subset:#b}) = {subset_value} > value({superset:#b}) = {superset_value}")]
    MonotonicityViolation {
        subset: usize,
        superset: usize,
        subset_value: f64,
        superset_value: f64,
    },
    #[error("non-finite value {value} at position {index}")]
    NonFinite { index: usize, value: f64 },
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("function takes negative value {value} at point {index}")]
    NegativeFunction { index: usize, value: f64 },

    // weights
    #[error("argument {0} lies outside [0, 1]")]
    Domain(f64),
    #[error("unknown weight '{0}'")]
    UnknownWeight(String),
    #[error("bad weight parameter: {0}")]
    BadParam(String),
    #[error("invalid weight function: {0}")]
    InvalidWeight(String),
    #[error("weight '{0}' is discontinuous; this operation needs a continuous weight")]
    DiscontinuousWeight(String),
    #[error("weight '{0}' does not satisfy alpha(1) = 1; this operation needs a normalized weight")]
    UnnormalizedWeight(String),
    #[error("weight '{name}' must be {required}")]
    Shape { name: String, required: &'static str },

    // spectra
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    ConvergenceFailure { sweeps: usize, off_norm: f64 },
    #[error("dimension {dim} exceeds the maximum of {max}")]
    DimensionOverflow { dim: usize, max: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix data has {found} entries, expected {expected}")]
    BadMatrixData { expected: usize, found: usize },
    #[error("invalid spectral distribution: {0}")]
    InvalidDistribution(String),
    #[error("spectrum has negative value {0}; a positive operator is required")]
    NegativeSpectrum(f64),

    // traces
    #[error("exponent must be at least 1, got {0}")]
    BadExponent(f64),
    #[error("threshold function must be positive at k, got f(k) = {0}")]
    BadThreshold(f64),

    // models and experiments
    #[error("n = {n} exceeds the cap of {max}")]
    Overflow { n: usize, max: usize },
    #[error("moment order k = {k} exceeds n = {n}")]
    BadOrder { k: usize, n: usize },
    #[error("period must be positive")]
    BadPeriod,
    #[error("sequence is empty")]
    EmptySequence,
    #[error("tail fraction {0} must lie in (0, 1]")]
    BadFraction(f64),
    #[error("power-series coefficient {value} at index {index} is negative")]
    NegativeCoefficient { index: usize, value: f64 },
}
