use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("position index must be at least 1")]
    ZeroIndex,

    #[error("index beyond finite family: position {index} requested, family has {len} sets")]
    IndexBeyondFamily { index: usize, len: usize },

    #[error("invalid family: {0}")]
    InvalidFamily(String),

    #[error("ground identifier overflow while evaluating position {0}")]
    Overflow(usize),

    #[error("undecidable family shape: {0}")]
    UndecidableFamilyShape(String),

    #[error("family is full; no tight set")]
    FamilyIsFull,

    #[error("window too large: {entries} entries exceed the cap of {cap}")]
    WindowTooLarge { entries: usize, cap: usize },

    #[error("Hall violation at {0}: premises inconsistent")]
    HallViolation(String),

    #[error("bounds too large for exhaustive oracle: {0}")]
    BoundsTooLarge(String),

    #[error("pattern not found within bound: no l <= {bound} with N({m})*g below l*Q")]
    PatternNotFound { m: usize, bound: usize },
}
