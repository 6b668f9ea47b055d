use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("axis `{0}` not found")]
    AxisNotFound(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("not normalized: {0}")]
    NotNormalized(String),
    #[error("composition error: {0}")]
    Composition(String),
    #[error("product space has {cells} cells, above the cap of {cap}")]
    Size { cells: u128, cap: usize },
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported dimension {dim} (at most {max})")]
    UnsupportedDimension { dim: usize, max: usize },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("input error: {0}")]
    Input(String),
}
