use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degenerate tetrahedron {tet} (volume {volume:e})")]
    MeshQuality { tet: usize, volume: f64 },

    #[error("surface topology error: {0}")]
    Topology(String),

    #[error("non-finite value at node {node}")]
    NonFinite { node: usize },

    #[error("degenerate magnetization at node {node} (|m| = {norm:e})")]
    DegenerateMagnetization { node: usize, norm: f64 },

    #[error("solver failed to converge after {iterations} iterations (relative residual {residual:e})")]
    SolverFailure { iterations: usize, residual: f64 },

    #[error("singular diagonal block {block}")]
    SingularBlock { block: usize },

    #[error("matrix is not symmetric positive definite")]
    NotPositiveDefinite,

    #[error("assembly error: {0}")]
    Assembly(String),

    #[error("initialization error: {0}")]
    Initialization(String),

    #[error("config error{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Config { line: Option<usize>, message: String },

    #[error("step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("non-finite state detected at step {step}")]
    NanDetected { step: usize },

    #[error("energy bound exceeded at step {step}: {value:e} > cap {cap:e}")]
    EnergyBound { step: usize, value: f64, cap: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(line: Option<usize>, message: impl Into<String>) -> Self {
        Error::Config { line, message: message.into() }
    }

    /// True for failures of an iterative or direct solve, possibly wrapped in a step.
    pub fn is_solver_failure(&self) -> bool {
        match self {
            Error::SolverFailure { .. } | Error::SingularBlock { .. } | Error::NotPositiveDefinite => true,
            Error::Step { source, .. } => source.is_solver_failure(),
            _ => false,
        }
    }
}
