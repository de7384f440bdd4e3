use thiserror::Error;

use crate::fock::ModeLabel;

/// Errors raised by state construction, optical elements and experiments.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("mode {0} appears in both registries")]
    ModeCollision(ModeLabel),
    #[error("occupation {total} exceeds truncation cap {cap}")]
    TruncationOverflow { total: u32, cap: u32 },
    #[error("partial trace requires a non-empty set of kept modes")]
    EmptySubsystem,
    #[error("{branches} principal branches but {pointers} pointer states")]
    BranchPointerMismatch { branches: usize, pointers: usize },
    #[error("state is not supported on two qubits: {0}")]
    UnsupportedDimension(String),
    #[error("cannot normalize the zero vector")]
    ZeroState,
    #[error("mode {0} is not in the registry")]
    UnknownMode(ModeLabel),
    #[error("non-unitary element: |alpha|^2 + |beta|^2 = {0}")]
    NonUnitaryElement(f64),
    #[error("delay applied to mode {0} without a frequency grid")]
    MissingFrequencyGrid(ModeLabel),
    #[error("no polarization degree of freedom on path {0}")]
    UnpolarizedState(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("degenerate grid: need at least two modes, got {0}")]
    DegenerateGrid(usize),
    #[error("invalid environment state: {0}")]
    InvalidEnvironment(String),
    #[error("heralding outcome has zero probability")]
    HeraldFailure,
    #[error("phonon state carries no excitation to read out")]
    NothingToRead,
    #[error("unsupported state: {0}")]
    UnsupportedState(String),
    #[error("states live on different registries")]
    RegistryMismatch,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("numerical invariant violated: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
