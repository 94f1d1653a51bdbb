use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("integration failed at lambda={lambda}, s={s}: {reason}")]
    Integration { lambda: f64, s: f64, reason: String },

    #[error("shooting failed: {0}")]
    Shooting(String),

    #[error("right-hand side is not orthogonal to the kernel (relative overlap {overlap:.3e})")]
    Fredholm { overlap: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate crossing: {0}")]
    Degenerate(String),

    #[error("corner term unresolved: c lies in [{lo}, {hi}]")]
    UnresolvedCorner { lo: i32, hi: i32 },

    #[error("continuation failed: {0}")]
    Continuation(String),

    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
