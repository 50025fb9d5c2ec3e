use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    /// A caller-supplied value is outside the operation's domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two objects that must share a shape do not.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// Input and output occupations carry different particle numbers.
    #[error("particle-number mismatch: {input} in, {output} out")]
    TotalMismatch { input: usize, output: usize },

    /// A fermionic mode would hold more than one particle.
    #[error("Pauli exclusion: fermion mode {mode} occupied {count} times")]
    PauliExclusion { mode: usize, count: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("permanent size {0} exceeds the supported maximum of {max}", max = crate::kernels::MAX_PERMANENT_SIZE)]
    SizeOverflow(usize),

    /// A matrix failed the U U^dagger = I check.
    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid stochastic data: {0}")]
    NotStochastic(String),

    #[error("coarse graining does not partition the basis: {0}")]
    IncompletePartition(String),

    /// Eigenvalue 1 is degenerate, so no unique steady state exists.
    #[error("fixed point is not unique (eigenvalue-1 multiplicity {multiplicity})")]
    NonUniqueFixedPoint { multiplicity: usize },

    /// The classical reference probability vanishes.
    #[error("undefined ratio: classical probability is zero")]
    UndefinedRatio,

    #[error("did not reach epsilon within {steps} steps")]
    NotConverged { steps: usize },

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type FockResult<T> = Result<T, FockError>;
