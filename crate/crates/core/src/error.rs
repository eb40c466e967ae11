use num_bigint::BigInt;
use thiserror::Error;

/// Everything that can go wrong inside the engine.
///
/// Resource failures (`FactorBoundExceeded`, `SearchExhausted`) are kept
/// distinct from mathematical verdicts so callers never confuse the two.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("composite cofactor {cofactor} left after trial division to {bound}")]
    FactorBoundExceeded { cofactor: BigInt, bound: u64 },
    #[error("zero element where a nonzero one is required")]
    ZeroElement,
    #[error("operation not supported over {0}")]
    UnsupportedField(String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("elements live over different fields")]
    FieldMismatch,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("quadratic form is singular")]
    SingularForm,
    #[error("quadratic form is anisotropic")]
    NotIsotropic,
    #[error("no isotropic vector of height <= {bound} found")]
    SearchExhausted { bound: u64 },
    #[error("vector is not isotropic for the form")]
    NotIsotropicVector,
    #[error("euler characteristic formula requires even n, got {0}")]
    OddDimension(usize),
    #[error("extension generator is a square in the base field")]
    NonSquarefreeExtension,
    #[error("pairing section requires odd n, got {0}")]
    OddCaseOnly(usize),
    #[error("certificate entry has degree above one")]
    DegreeTooHigh,
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
    #[error("no vector orthogonal to the given one")]
    NoOrthogonalVector,
    #[error("every orthogonal candidate is isotropic")]
    DegenerateChoice,
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
}

impl Error {
    /// Stable machine-readable name, used in CLI output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::FactorBoundExceeded { .. } => "FactorBoundExceeded",
            Error::ZeroElement => "ZeroElement",
            Error::UnsupportedField(_) => "UnsupportedField",
            Error::InvalidField(_) => "InvalidField",
            Error::InvalidElement(_) => "InvalidElement",
            Error::FieldMismatch => "FieldMismatch",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::SingularForm => "SingularForm",
            Error::NotIsotropic => "NotIsotropic",
            Error::SearchExhausted { .. } => "SearchExhausted",
            Error::NotIsotropicVector => "NotIsotropicVector",
            Error::OddDimension(_) => "OddDimension",
            Error::NonSquarefreeExtension => "NonSquarefreeExtension",
            Error::OddCaseOnly(_) => "OddCaseOnly",
            Error::DegreeTooHigh => "DegreeTooHigh",
            Error::InvalidCertificate(_) => "InvalidCertificate",
            Error::NoOrthogonalVector => "NoOrthogonalVector",
            Error::DegenerateChoice => "DegenerateChoice",
            Error::InvalidProblem(_) => "InvalidProblem",
        }
    }

    /// True for failures caused by configured limits rather than by the input's mathematics.
    pub fn is_resource_limit(&self) -> bool {
        matches!(
            self,
            Error::FactorBoundExceeded { .. } | Error::SearchExhausted { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
