use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{value} lies outside {domain}")]
    Domain { value: String, domain: String },

    #[error("slope {0} is outside the admissible range [sqrt(2), 2]")]
    InadmissibleSlope(String),

    #[error("invalid tail rule: {0}")]
    InvalidTail(String),

    #[error("points do not share a composant representation within {0} re-anchoring steps")]
    NotSameComposant(usize),

    #[error("partition would need 2^{exponent} points, above the cap of {cap}")]
    PartitionCap { exponent: u32, cap: usize },

    #[error("degenerate chain: {0}")]
    DegenerateChain(String),

    #[error("omega-limit set is not certified finite; folding-point enumeration refused")]
    OmegaNotFinite,

    #[error("adjusted map is ambiguous in link {link}: {count} p-points in the arc component")]
    Ambiguous { link: usize, count: usize },

    #[error("no level below {0} makes the connecting arc injective")]
    NoInjectiveLevel(usize),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
