use thiserror::Error;

use crate::factor::FactorId;
use crate::word::Word;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("elements belong to different factors ({0} and {1})")]
    FactorMismatch(FactorId, FactorId),

    #[error("element {value} is not an integer but factor {factor} is Z")]
    NotInFactor { factor: FactorId, value: String },

    #[error("factor {0} is outside the declared catalog")]
    UnknownFactor(FactorId),

    #[error("order unavailable for factor {0}")]
    OrderUnavailable(FactorId),

    #[error("truncated series caps differ ({0} vs {1})")]
    CapMismatch(usize, usize),

    #[error("no nonzero coefficient up to degree {0}; embedding degree bound violated")]
    InternalDegreeBoundViolated(usize),

    #[error("empty word")]
    EmptyWord,

    #[error("word is not cyclically reduced")]
    NotCyclicallyReduced,

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("subgroup is not factor-free: {witness} lies in a conjugate of a factor")]
    FactorFreeViolation { witness: Word },

    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),

    #[error("every component has non-negative Euler characteristic")]
    ChiNonNegative,

    #[error("instance generation gave up after {0} rejected samples")]
    RetriesExhausted(usize),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
