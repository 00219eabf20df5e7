use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("subsystem {0} not present in layout")]
    UnknownSubsystem(String),

    #[error("duplicate subsystem {0}")]
    DuplicateSubsystem(String),

    #[error("matrix is not unitary (max deviation {dev:.3e})")]
    NotUnitary { dev: f64 },

    #[error("operator is not a projector (max deviation {dev:.3e})")]
    NotProjector { dev: f64 },

    #[error("basis is not orthonormal (max deviation {dev:.3e})")]
    BasisNotOrthonormal { dev: f64 },

    #[error("gate arity {arity} does not match {targets} target(s)")]
    ArityMismatch { arity: usize, targets: usize },

    #[error("sub-state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),

    #[error("invalid ensemble weights: {0}")]
    InvalidWeights(String),

    #[error("partition must be a non-empty proper subset of the layout")]
    BadPartition,

    #[error("state does not factor across the requested split (second singular value {0:.3e})")]
    NotProduct(f64),

    #[error("requested branch has vanishing probability ({0:.3e})")]
    ForbiddenBranch(f64),

    #[error("electron is not a bright factor of the state (bright weight {0})")]
    NotBrightFactored(f64),

    #[error("photon count {m} outside supported range 1..={max}")]
    PhotonCountRange { m: u32, max: u32 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("calibration search exhausted without a passing sequence; best candidate: {0}")]
    CalibrationExhausted(String),

    #[error("post-selection gave up after {0} attempts")]
    RetryLimit(u64),
}
