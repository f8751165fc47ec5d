use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |H - H^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("density matrix trace is {trace}, expected 1")]
    BadTrace { trace: f64 },

    #[error("not a physical two-qubit state: {reason}")]
    NotAState { reason: String },

    #[error("invalid bath parameter {field}: {reason}")]
    InvalidBath { field: &'static str, reason: String },

    #[error("invalid system parameter {field}: {reason}")]
    InvalidSystem { field: &'static str, reason: String },

    #[error(
        "bath of {n_spins} spins exceeds the brute-force cap of {cap}; use a collapsed engine"
    )]
    CapExceeded { n_spins: usize, cap: usize },

    #[error("bath is not uniform: {reason}")]
    NotUniform { reason: &'static str },

    #[error("bath ensemble has no terms")]
    EmptyEnsemble,

    #[error("time grid is empty")]
    EmptyGrid,

    #[error("time grid is not strictly increasing at index {index}")]
    GridNotIncreasing { index: usize },
}
