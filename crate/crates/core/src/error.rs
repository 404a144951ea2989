use thiserror::Error;

/// Errors raised anywhere in the toolkit.
///
/// Variants are grouped so that frontends can map them onto a small set of
/// exit codes: [`Error::is_config`] for invalid inputs, everything else is a
/// numeric or solver failure.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular flux bias {bias} (tan/sec singularity)")]
    SingularBias { bias: f64 },

    #[error("degenerate mode frequencies: {0}")]
    DegenerateFrequencies(String),

    #[error("subsystem index {index} out of range for a register of {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("operator kind {kind} cannot act on {subsystem} subsystem {index}")]
    KindMismatch {
        kind: &'static str,
        subsystem: &'static str,
        index: usize,
    },

    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),

    #[error("occupation {occupation} exceeds cutoff {cutoff} on subsystem {index}")]
    OccupationExceedsCutoff {
        index: usize,
        occupation: usize,
        cutoff: usize,
    },

    #[error("dimension {dim} too large for the dense path (limit {limit})")]
    DimensionTooLarge { dim: usize, limit: usize },

    #[error("step size underflow at t = {time}")]
    StepUnderflow { time: f64 },

    #[error("non-Hermitian Hamiltonian: {0}")]
    NonHermitian(String),

    #[error("pump mismatch: {0}")]
    PumpMismatch(String),

    #[error("unknown {what} '{name}'")]
    Unknown { what: &'static str, name: String },

    #[error("malformed state data: {0}")]
    MalformedState(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True when the error stems from user-supplied configuration rather
    /// than from a numerical failure.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::IndexOutOfRange { .. }
                | Error::KindMismatch { .. }
                | Error::LayoutMismatch(_)
                | Error::OccupationExceedsCutoff { .. }
                | Error::Unknown { .. }
                | Error::MalformedState(_)
                | Error::Json(_)
                | Error::PumpMismatch(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
