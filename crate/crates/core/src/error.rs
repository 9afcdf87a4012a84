use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("configuration is not proper: edge {{{u},{v}}} has both endpoints coloured {colour}")]
    NotProper { u: usize, v: usize, colour: u16 },

    #[error("dimension mismatch: expected {expected} entries, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("colour {colour} at vertex {vertex} outside 0..={max}")]
    ColourRange { vertex: usize, colour: u16, max: u16 },

    #[error("n*d must be even for a d-regular graph (n={n}, d={d})")]
    OddDegreeSum { n: usize, d: usize },

    #[error("random regular graph generation failed after {attempts} attempts (n={n}, d={d})")]
    RegularRetriesExhausted { n: usize, d: usize, attempts: usize },

    #[error("edge list line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("state space budget exceeded: more than {budget} states")]
    BudgetExceeded { budget: usize },

    #[error("generator is reducible: {0}")]
    Reducible(String),

    #[error("fast-mixing condition unsatisfied (beta = {beta})")]
    ConditionUnsatisfied { beta: f64 },

    #[error("queue bound infeasible at vertex {vertex}: nu = {nu} >= s = {s}")]
    Infeasible { vertex: usize, nu: f64, s: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
