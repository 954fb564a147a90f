use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1} qubits")]
    Dimension(usize, usize),
    #[error("capacity exceeded: {what} = {got}, limit {limit}")]
    Capacity { what: &'static str, got: usize, limit: usize },
    #[error("generators do not commute: #{0} and #{1}")]
    NotStabilizerGroup(usize, usize),
    #[error("stabilizer group contains -I")]
    InconsistentSigns,
    #[error("invalid lattice: {0}")]
    Lattice(String),
    #[error("open boundary has no homology loops")]
    NoLoops,
    #[error("mode index {0} out of range (1..={1})")]
    ModeOutOfRange(usize, usize),
    #[error("sector is empty: {0}")]
    EmptySector(String),
    #[error("operator does not preserve the sector: leakage {0:e}")]
    NotBlockPreserving(f64),
    #[error("resolvent is singular (island gap is zero)")]
    SingularResolvent,
    #[error("fit needs at least {need} points, got {got}")]
    Fit { need: usize, got: usize },
    #[error("invalid gauge configuration: {0}")]
    InvalidGauge(String),
    #[error("odd lattice size L = {0} is not supported by the Ising reduction")]
    OddSize(usize),
    #[error("parity-violating perturbation: {0}")]
    ParityViolating(String),
    #[error("eigensolver did not converge: {0}")]
    NoConvergence(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
