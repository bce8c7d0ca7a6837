//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:.3e} > tol {tol:.3e})")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("state is not normalized (norm^2 = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("Hilbert spaces do not match: {left} vs {right} qubits")]
    SpaceMismatch { left: usize, right: usize },

    #[error("expectation value has imaginary part {imag:.3e}")]
    NonHermitianResult { imag: f64 },

    #[error("Kraus operators are not complete (max deviation {deviation:.3e})")]
    IncompleteKraus { deviation: f64 },

    #[error("invalid Pauli channel: {0}")]
    InvalidPauliChannel(String),

    #[error("rate {0} outside [0, 1]")]
    RateOutOfRange(f64),

    #[error("target qubit {target} out of range for {n_qubits} qubits")]
    TargetOutOfRange { target: usize, n_qubits: usize },

    #[error("duplicate target qubit {0}")]
    DuplicateTarget(usize),

    #[error("twirl frame element {index} is not unitary")]
    NonUnitaryFrame { index: usize },

    #[error("bad specification: {0}")]
    BadSpec(String),

    #[error("parameter vector has length {got}, circuit expects {expected}")]
    ParamLengthMismatch { expected: usize, got: usize },

    #[error("channel acts on {channel} qubits but is attached to {expected}")]
    ChannelSpaceMismatch { channel: usize, expected: usize },

    #[error("state is not pure (purity {purity})")]
    NotPure { purity: f64 },

    #[error("error count {m} outside 0..={layers}")]
    MOutOfRange { m: u64, layers: u64 },

    #[error("first-order expansion invalid: p*L = {0} >= 1")]
    FirstOrderInvalid(f64),

    #[error("tomography result is missing Pauli string {0}")]
    IncompletePauliSet(String),

    #[error("purity {purity} below the maximally mixed floor {floor}")]
    PurityBelowFloor { purity: f64, floor: f64 },

    #[error("purity {0} above one")]
    PurityAboveOne(f64),

    #[error("state is fully depolarized (r = {0}); mitigation undefined")]
    FullyDepolarized(f64),

    #[error("dimension {0} exceeds the dense-matrix envelope")]
    TooLarge(usize),

    #[error("optimizer diverged at iteration {iteration}")]
    OptimizerDiverged { iteration: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
