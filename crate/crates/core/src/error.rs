use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("qubit {0} appears more than once in the target list")]
    RepeatedTarget(usize),

    #[error("qubit {qubit} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },

    #[error("empty qubit selection")]
    EmptySelection,

    #[error("invalid bit value {0}, expected 0 or 1")]
    InvalidBit(u8),

    #[error("state is not normalized (norm = {0})")]
    NotNormalized(f64),

    #[error("measurement branch has probability {0:e}, below the collapse threshold")]
    DegenerateBranch(f64),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NonHermitian(f64),

    #[error("invalid device graph: {}", .0.join("; "))]
    InvalidGraph(Vec<String>),

    #[error("discontinuous schedule at t = {0} inside an integration segment")]
    StepInsideSegment(f64),

    #[error("time step failed to converge: deviation {deviation:e} exceeds tolerance {tolerance:e}")]
    Convergence { deviation: f64, tolerance: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("oscillation fit failed: {0}")]
    NonOscillatory(String),

    #[error("register of {requested} qubits exceeds the budget of {budget}")]
    QubitBudget { requested: usize, budget: usize },
}

impl Error {
    /// True for failures of the numerical machinery rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Convergence { .. } | Error::NonOscillatory(_) | Error::DegenerateBranch(_)
        )
    }
}
