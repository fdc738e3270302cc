use thiserror::Error;

/// Errors raised by the spectral laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// The depth variant is not valid for the requested symbol or field family.
    #[error("invalid family: {0}")]
    InvalidFamily(String),
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A Hermite degree above the supported cap was requested.
    #[error("hermite degree {degree} exceeds the cap {cap}")]
    DegreeLimit { degree: usize, cap: usize },
    /// A physical grid too coarse for exact (alias-free) transforms.
    #[error("grid of {grid} points aliases; need at least {required}")]
    Aliasing { grid: usize, required: usize },
    /// Brute-force oracle requested beyond its size limit.
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    /// All importance weights vanished or the normalizer is not finite.
    #[error("degenerate ensemble: {0}")]
    DegenerateEnsemble(String),
    /// Time step repeatedly rejected by the conservation monitor.
    #[error("step rejected after {halvings} halvings at t = {time}: relative drift {drift:e}")]
    StepRejected { time: f64, halvings: u32, drift: f64 },
    /// Inputs that must be paired (coupled samples) are not.
    #[error("unpaired inputs: {0}")]
    Unpaired(String),
    /// Malformed snapshot, ensemble or trajectory file.
    #[error("format error: {0}")]
    Format(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
