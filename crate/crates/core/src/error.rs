use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("integral symmetry violated by {deviation:e} (tolerance 1e-10)")]
    AsymmetricIntegrals { deviation: f64 },

    #[error("determinants {from} and {to} differ in particle number")]
    ParticleNumber { from: String, to: String },

    #[error("not a pure excitation of the reference: {0}")]
    NotPureExcitation(String),

    #[error("generator failed the nilpotency check A^3 = -A")]
    NotNilpotent,

    #[error("rank-aware truncation requires a fermionic operator")]
    RankAwareOnPauli,

    #[error("operator is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("backend: {0}")]
    Backend(String),

    #[error("{0} qubits exceeds the supported maximum of {1}")]
    TooManyQubits(usize, usize),
}

pub type Result<T> = std::result::Result<T, Error>;
