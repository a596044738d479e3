use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("stability violated: load {load} must be < 1")]
    Unstable { load: f64 },

    #[error("operation requires a {expected} system")]
    WrongScenario { expected: &'static str },

    #[error("variance unavailable for heavy-tailed distribution")]
    VarianceUnavailable,

    #[error("calibration out of range: radicand {radicand} is negative")]
    CalibrationOutOfRange { radicand: f64 },

    #[error("no solution: target {target} is below the smallest attainable bound {floor}")]
    NoSolution { target: f64, floor: f64 },

    #[error("least-squares design matrix is rank deficient")]
    SingularDesign,

    #[error("least squares needs at least 3 rows, got {rows}")]
    Underdetermined { rows: usize },
}

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }
}
