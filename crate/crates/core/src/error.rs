//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the solvers, the ansatz, training and analysis.
#[derive(Debug, Error)]
pub enum Error {
    /// A chain too small for the requested model.
    #[error("invalid system: {0}")]
    InvalidSystem(String),

    /// A Pauli term that cannot be represented (wrong length, odd Y count).
    #[error("invalid Hamiltonian term: {0}")]
    InvalidTerm(String),

    /// Vector length does not match the Hilbert-space dimension.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// System size beyond the in-memory solve limit.
    #[error("capacity exceeded: {n_sites} sites (limit {limit})")]
    Capacity { n_sites: usize, limit: usize },

    /// The iterative eigensolver did not reach the required residual.
    #[error("eigensolver did not converge: residual {residual:.3e}")]
    SolverNoConvergence { residual: f64 },

    /// A wavefunction evaluation or parameter update left the finite range.
    #[error("numeric overflow in {context}")]
    NumericOverflow { context: String },

    /// An all-zero state where a normalizable one is required.
    #[error("degenerate state: {0}")]
    DegenerateState(String),

    /// An out-of-range argument.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Energy expectation with an imaginary part too large to be round-off.
    #[error("imaginary residue {residue:.3e} exceeds tolerance {tolerance:.3e}")]
    ImaginaryResidue { residue: f64, tolerance: f64 },

    /// A sweep with failed or skipped grid points where a complete one is needed.
    #[error("incomplete sweep: missing couplings {missing:?}")]
    IncompleteSweep { missing: Vec<f64> },

    /// The projection curve attains its minimum only at a grid endpoint.
    #[error("no interior extremum on component {component_index} (the transition signature is absent)")]
    NoInteriorExtremum { component_index: usize },

    /// Invalid run configuration.
    #[error("config error: {0}")]
    Config(String),

    /// Malformed input files (ragged or missing CSV, bad manifest).
    #[error("input error: {0}")]
    Input(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
