use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid architecture: {0}")]
    InvalidArchitecture(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("architecture mismatch between parameter vectors")]
    ArchitectureMismatch,
    #[error("empty batch or dataset")]
    Empty,
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("cell (group={group}, label={label}) is empty")]
    EmptyCell { group: u8, label: u8 },
    #[error("cell (group={group}, label={label}) has {count} rows, too few to split")]
    CellTooSmall { group: u8, label: u8, count: usize },
    #[error("true positive rate undefined: no rows with group={group}, label={label}")]
    UndefinedTpr { group: u8, label: u8 },
    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(&'static str),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("individual {0} has no objectives")]
    MissingObjectives(u64),
    #[error("individual {0} has no fitness")]
    MissingFitness(u64),
    #[error("population of {have} is smaller than requested {want}")]
    PopulationTooSmall { have: usize, want: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
}
