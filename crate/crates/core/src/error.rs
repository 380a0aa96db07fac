use thiserror::Error;

use crate::signal::Domain;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid total {total} exceeds the dense storage cap {cap}")]
    GridCapExceeded { total: u64, cap: usize },

    #[error("expected a {expected} signal, got a {found} signal")]
    DomainMismatch { expected: Domain, found: Domain },

    #[error("grid mismatch: ({0}) vs ({1})")]
    GridMismatch(String, String),

    #[error("invalid signal: {0}")]
    InvalidSignal(String),

    #[error("invalid index set: {0}")]
    InvalidSet(String),

    #[error("set must be nonempty")]
    EmptySet,

    #[error("brute-force cap exceeded: {0}")]
    CapExceeded(String),

    #[error("combinatorial budget exceeded: {needed} > {budget}")]
    BudgetExceeded { needed: f64, budget: f64 },

    #[error("energy rounding residue {residue:e} exceeds tolerance (value {value})")]
    EnergyResidue { value: f64, residue: f64 },

    #[error("modulus {0} is not prime")]
    CompositeModulus(usize),

    #[error("set is not a subgroup: {0}")]
    NotSubgroup(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("missing parameter {0}")]
    MissingParameter(&'static str),

    #[error("no support of size <= {0} fits the observed spectrum")]
    NoFit(usize),

    #[error("malformed file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
