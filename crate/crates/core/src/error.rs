use thiserror::Error;

use crate::nc_algebra::{Letter, Time};

#[derive(Debug, Error)]
pub enum LabError {
    #[error("{op}: letter {letter} is not allowed here")]
    UnexpectedLetter { op: &'static str, letter: Letter },
    #[error("{op}: letter {letter} has time after the conditioning time {t}")]
    FutureLetter { op: &'static str, letter: Letter, t: Time },
    #[error("conditional expectation: {count} free-family letters exceed the cap of {cap}")]
    DegreeCap { count: usize, cap: usize },
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("no moment available for {0}")]
    MissingMoment(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("polynomial is not self-adjoint: {0}")]
    NotSelfAdjoint(String),
    #[error("time {0} is not on the snapshot grid")]
    MissingSnapshot(Time),
    #[error("no matrix for x({g},{j})")]
    MissingMatrix { g: u32, j: u32 },
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("drift matrix deviates from Hermitian by {0:e} (relative)")]
    NonHermitianDrift(f64),
    #[error("drift evaluation failed at step {step}: {source}")]
    DriftAtStep { step: usize, source: Box<LabError> },
    #[error("snapshot storage of {bytes} bytes exceeds the cap of {cap} bytes")]
    MemoryCap { bytes: u64, cap: u64 },
    #[error("singular linear system")]
    Singular,
    #[error("config error at {path}: {msg}")]
    Config { path: String, msg: String },
    #[error("path store: {0}")]
    Store(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;
