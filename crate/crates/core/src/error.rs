use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unsupported dimension {0}: expected 1, 2 or 3")]
    UnsupportedDimension(usize),
    #[error("capacity exceeded for {what}: {requested} > limit {limit}")]
    Capacity {
        what: &'static str,
        requested: u128,
        limit: u128,
    },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),
    #[error("field radius {radius} is smaller than the required radius {needed}")]
    FieldTooSmall { radius: usize, needed: usize },
    #[error("non-finite potential value at ball index {index}")]
    NonFiniteField { index: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("provenance mismatch: {0}")]
    ProvenanceMismatch(&'static str),
    #[error("internal corruption: {0}")]
    Corrupt(&'static str),
    #[error("scenario precondition violated: {0}")]
    Precondition(String),
    #[error("no sign change of psi_N(y) - psi_N(x) in ({lo}, {hi}) for n={n}, epsilon={epsilon}")]
    NoSwitch {
        n: usize,
        epsilon: f64,
        lo: usize,
        hi: usize,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
