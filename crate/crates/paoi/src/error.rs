use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] paoi_core::Error),

    #[error("{0}")]
    Validation(String),

    #[error("{0}")]
    Runtime(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.to_string(),
        }
    }

    /// Process exit status: 1 validation, 2 runtime/numeric, 3 I/O.
    pub fn exit_code(&self) -> u8 {
        use paoi_core::Error as C;
        match self {
            Error::Validation(_) | Error::Parse { .. } => 1,
            Error::Runtime(_) => 2,
            Error::Io { .. } => 3,
            Error::Core(e) => match e {
                C::InvalidParameter { .. }
                | C::InvalidInput(_)
                | C::Unstable { .. }
                | C::WrongScenario { .. }
                | C::VarianceUnavailable => 1,
                _ => 2,
            },
        }
    }
}
