use thiserror::Error;

/// Crate-wide error type. Every failure is a violated precondition or a
/// numerical breakdown; there are no warnings and nothing is silently
/// clamped, truncated, or skipped.
#[derive(Debug, Error)]
pub enum Error {
    #[error("symbol {symbol} is outside the alphabet of size {alphabet_size}")]
    SymbolOutOfRange { symbol: usize, alphabet_size: usize },

    #[error("invalid transition matrix: {0}")]
    InvalidTransition(String),

    #[error("word leaves the shift space: forbidden transition at position {position}")]
    InadmissibleWord { position: usize },

    #[error("operation needs {needed} coordinates but the prefix capacity is {capacity}")]
    CapacityExceeded { needed: usize, capacity: usize },

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("objects disagree on dimensions: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not row-stochastic: {0}")]
    NotStochastic(String),

    #[error(
        "stochastic entry ({from}, {to}) is positive but the transition matrix forbids that pair"
    )]
    SupportViolation { from: usize, to: usize },

    #[error("support digraph is reducible; communicating classes: {classes}")]
    Reducible { classes: String },

    #[error("measure would be atomic: {0}")]
    Atomic(String),

    #[error("transition matrix is not primitive: {0}")]
    NotPrimitive(String),

    #[error("power iteration did not converge within {iterations} rounds (last residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("enumeration of {words} words exceeds the budget of {budget}")]
    EnumerationBudget { words: u128, budget: u128 },

    #[error("potential range {range} exceeds {max} for this operation; block-recode to a range-2 presentation first")]
    RangeTooLarge { range: usize, max: usize },

    #[error("point outside measure support: zero-mass factor entering coordinate {position}")]
    OutsideSupport { position: usize },

    #[error("sample batch was drawn from measure {batch_id} but is being verified against measure {expected_id}")]
    MeasureMismatch {
        batch_id: String,
        expected_id: String,
    },

    #[error("invalid evaluation grid: {0}")]
    InvalidGrid(String),

    #[error(
        "diagnostics reject the Gibbs hypothesis (max ln delta = {max_log_delta:.3}, worst |slope| = {worst_slope:.4}); no equilibrium verdict is issued"
    )]
    GibbsRejected {
        max_log_delta: f64,
        worst_slope: f64,
    },

    #[error("internal invariant violated: {0}")]
    InvariantViolated(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
