use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no facilities open")]
    NoFacilitiesOpen,

    #[error("invalid selection: {0}")]
    InvalidSelection(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("{what}: size {size} exceeds cap {cap}")]
    SizeCap { what: String, size: u128, cap: u128 },

    #[error("unsupported metric: {0}")]
    UnsupportedMetric(String),

    #[error("construction failed after {attempts} attempts: {detail}")]
    ConstructionFailure { attempts: usize, detail: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("schema error at {path}: {reason}")]
    Schema { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn schema(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            reason: reason.into(),
        }
    }

    /// True for failures of the numerical machinery rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_))
    }
}
