use thiserror::Error;

/// Errors raised by the calculus, integration and serialization layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NcError {
    #[error("index ({i}, {j}) out of range for size {n}")]
    IndexOutOfRange { i: usize, j: usize, n: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("order mismatch: expected {expected}, found {found}")]
    OrderMismatch { expected: usize, found: usize },

    #[error("slot {slot} out of range for order {order}")]
    SlotOutOfRange { slot: usize, order: usize },

    #[error("component {alpha} out of range for dimension {dim}")]
    ComponentOutOfRange { alpha: usize, dim: usize },

    /// `E_kk . D(E_ii) . E_kk != 0`; indices are 1-based.
    #[error("derivation is not inner: D(E_{i}{i}) has nonzero ({k},{k}) entry")]
    NotInner { i: usize, k: usize },

    #[error("postcondition failed: {0}")]
    PostconditionFailure(String),

    #[error("precondition failed: {0}")]
    PreconditionFailure(String),

    #[error("not integrable: {0}")]
    NotIntegrable(String),

    #[error("polynomial not integrable: {0}")]
    NotIntegrablePoly(String),

    #[error("size {size} in slot {slot} is not a multiple of base size {base}")]
    SizeNotMultiple {
        slot: usize,
        size: usize,
        base: usize,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

impl NcError {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            NcError::IndexOutOfRange { .. } => "IndexOutOfRange",
            NcError::ShapeMismatch(_) => "ShapeMismatch",
            NcError::DimMismatch(_) => "DimMismatch",
            NcError::OrderMismatch { .. } => "OrderMismatch",
            NcError::SlotOutOfRange { .. } => "SlotOutOfRange",
            NcError::ComponentOutOfRange { .. } => "ComponentOutOfRange",
            NcError::NotInner { .. } => "NotInner",
            NcError::PostconditionFailure(_) => "PostconditionFailure",
            NcError::PreconditionFailure(_) => "PreconditionFailure",
            NcError::NotIntegrable(_) => "NotIntegrable",
            NcError::NotIntegrablePoly(_) => "NotIntegrablePoly",
            NcError::SizeNotMultiple { .. } => "SizeNotMultiple",
            NcError::Parse(_) => "Parse",
        }
    }

    /// True for errors that report a mathematical negative rather than bad input.
    pub fn is_mathematical(&self) -> bool {
        matches!(
            self,
            NcError::NotInner { .. }
                | NcError::PostconditionFailure(_)
                | NcError::PreconditionFailure(_)
                | NcError::NotIntegrable(_)
                | NcError::NotIntegrablePoly(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, NcError>;
