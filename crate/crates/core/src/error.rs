use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure classes surfaced by every module. The CLI maps each class to its
/// own exit status.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter is outside its admissible domain.
    #[error("configuration error: {0}")]
    Config(String),
    /// Boxes, regions or placements that cannot host the requested object.
    #[error("infeasible geometry: {0}")]
    Geometry(String),
    /// An n-particle sector that is empty or too large to assemble.
    #[error("infeasible sector: {0}")]
    Sector(String),
    #[error("eigensolver did not reach tolerance: residual {residual:.3e} exceeds {allowed:.3e}")]
    Solver { residual: f64, allowed: f64 },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn geometry(msg: impl Into<String>) -> Self {
        Error::Geometry(msg.into())
    }

    pub(crate) fn sector(msg: impl Into<String>) -> Self {
        Error::Sector(msg.into())
    }
}
