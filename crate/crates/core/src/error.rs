use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid group spec: {0}")]
    InvalidGroup(String),

    #[error("element belongs to a different group spec")]
    SpecMismatch,

    #[error("element index {index} out of range for group of order {order}")]
    IndexOutOfRange { index: usize, order: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A desk-scale cap was exceeded. `what` names the cap.
    #[error("{what} cap exceeded: {actual} > {cap}")]
    ScaleCap {
        what: &'static str,
        cap: usize,
        actual: usize,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no independent zero-sum triple found")]
    NoTripleFound,

    #[error("unsupported group family for this operation: {0}")]
    UnsupportedFamily(String),

    #[error("formula outside its domain: {0}")]
    FormulaDomain(String),

    #[error("malformed input: {0}")]
    Malformed(String),
}

impl Error {
    pub fn is_scale_cap(&self) -> bool {
        matches!(self, Error::ScaleCap { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
