use thiserror::Error;

/// Errors raised by the simulator and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("trace is not 1 (got {0})")]
    Trace(f64),

    #[error("matrix is not positive semi-definite (min eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error("invalid X state: {0}")]
    InvalidXState(String),

    #[error("state is not X-shaped (non-X mass {leakage:.3e})")]
    NotXShaped { leakage: f64 },

    #[error("X state cannot be prepared: {0}")]
    Infeasible(String),

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("Kraus set is not trace preserving (max deviation {0:.3e})")]
    NotCptp(f64),

    #[error("tomography protocol error: {0}")]
    Protocol(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for violations of a physical contract (as opposed to bad configuration or I/O).
    pub fn is_physics_violation(&self) -> bool {
        matches!(
            self,
            Error::NotHermitian(_)
                | Error::NotUnitary(_)
                | Error::Trace(_)
                | Error::NotPsd(_)
                | Error::InvalidProbabilities(_)
                | Error::InvalidXState(_)
                | Error::NotXShaped { .. }
                | Error::Infeasible(_)
                | Error::NotCptp(_)
                | Error::Dimension(_)
                | Error::InvalidGate(_)
                | Error::Protocol(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
