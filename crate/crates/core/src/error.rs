use thiserror::Error;

/// Errors raised across the toolkit. Each variant maps onto one CLI exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("format error: {0}")]
    Format(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    /// The ball does not carry enough nodes in general position for the requested
    /// polynomial space.
    #[error("degenerate ball: rank {rank} < {needed} required")]
    DegenerateBall { rank: usize, needed: usize },
}

impl Error {
    pub fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub fn geometry(msg: impl Into<String>) -> Self {
        Error::Geometry(msg.into())
    }

    pub fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }

    /// Process exit code: 1 parameter, 2 I/O, 3 geometry.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter(_) => 1,
            Error::Io(_) | Error::Format(_) => 2,
            Error::Geometry(_) | Error::DegenerateBall { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
