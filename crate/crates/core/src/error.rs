//! Crate-wide error type.
//!
//! Variant names double as the machine-readable error names reported by the
//! command-line front end, so renaming one is a format change.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("polynomial is not irreducible over Q")]
    NotIrreducible,
    #[error("automorphism belongs to a different field")]
    AutomorphismFieldMismatch,
    #[error("element lies outside the fixed coefficient field: {0}")]
    FieldTooSmall(String),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("division by the zero polynomial")]
    DivisionByZeroPolynomial,
    #[error("root modulus could not be separated from the radius after {iterations} iterations")]
    BoundaryUndecided { iterations: usize },
    #[error("operator kinds do not match")]
    KindMismatch,
    #[error("operator coefficient denominator vanishes at the origin")]
    DenominatorSingularAtOrigin,
    #[error("right division by the zero operator")]
    DivisionByZeroOperator,
    #[error("zero operator")]
    ZeroOperator,
    #[error("truncation order {given} is below the required {required}")]
    TruncationTooSmall { given: usize, required: usize },
    #[error("no relation within bounds: {0}")]
    NoRelationWithinBounds(String),
    #[error("function is not analytic on the disk: {0}")]
    NotAnalyticOnDisk(String),
    #[error("operator is not of the requested level")]
    NotLevelR,
    #[error("point is not in the punctured open unit disk")]
    PointOnBoundary,
    #[error("linear independence of the system functions is not certified")]
    IndependenceNotCertified,
    #[error("regularity condition fails: {0}")]
    RegularityFails(String),
    #[error("value is refuted by ball evaluation")]
    ValueNotAttained,
    #[error("order mismatch: {0}")]
    OrderMismatch(String),
    #[error("size guard exceeded: {0}")]
    SizeGuardExceeded(String),
    #[error("no basis component has a nonvanishing witness coefficient")]
    NoComponentWitness,
    #[error("iteration cap exceeded: {0}")]
    IterationCapExceeded(String),
    #[error("orbit hits a singularity at depth {ell}")]
    OrbitHitsSingularity { ell: usize },
    #[error("no coefficient bound available: {0}")]
    NoBoundAvailable(String),
    #[error("unknown corpus entry `{0}`")]
    UnknownCorpusEntry(String),
    #[error("syntax error at position {position}: {message}")]
    SyntaxError { position: usize, message: String },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable variant name, used in JSON reports.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NotMonic => "NotMonic",
            Error::NotIrreducible => "NotIrreducible",
            Error::AutomorphismFieldMismatch => "AutomorphismFieldMismatch",
            Error::FieldTooSmall(_) => "FieldTooSmall",
            Error::ZeroPolynomial => "ZeroPolynomial",
            Error::DivisionByZeroPolynomial => "DivisionByZeroPolynomial",
            Error::BoundaryUndecided { .. } => "BoundaryUndecided",
            Error::KindMismatch => "KindMismatch",
            Error::DenominatorSingularAtOrigin => "DenominatorSingularAtOrigin",
            Error::DivisionByZeroOperator => "DivisionByZeroOperator",
            Error::ZeroOperator => "ZeroOperator",
            Error::TruncationTooSmall { .. } => "TruncationTooSmall",
            Error::NoRelationWithinBounds(_) => "NoRelationWithinBounds",
            Error::NotAnalyticOnDisk(_) => "NotAnalyticOnDisk",
            Error::NotLevelR => "NotLevelR",
            Error::PointOnBoundary => "PointOnBoundary",
            Error::IndependenceNotCertified => "IndependenceNotCertified",
            Error::RegularityFails(_) => "RegularityFails",
            Error::ValueNotAttained => "ValueNotAttained",
            Error::OrderMismatch(_) => "OrderMismatch",
            Error::SizeGuardExceeded(_) => "SizeGuardExceeded",
            Error::NoComponentWitness => "NoComponentWitness",
            Error::IterationCapExceeded(_) => "IterationCapExceeded",
            Error::OrbitHitsSingularity { .. } => "OrbitHitsSingularity",
            Error::NoBoundAvailable(_) => "NoBoundAvailable",
            Error::UnknownCorpusEntry(_) => "UnknownCorpusEntry",
            Error::SyntaxError { .. } => "SyntaxError",
            Error::PreconditionViolated(_) => "PreconditionViolated",
            Error::InvalidInput(_) => "InvalidInput",
            Error::Io(_) => "Io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
