use thiserror::Error;

/// Structural failures: the engine could not compute a result.
///
/// Axiom violations are not errors; they are collected in a
/// [`Report`](crate::report::Report).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("closure did not stabilize within word length {bound}")]
    ClosureNotFinite { bound: usize },

    #[error("ill-formed relation: {0}")]
    IllFormedRelation(String),

    #[error("free category is not finite: a path of length {0} extends")]
    FreeCategoryNotFinite(usize),

    #[error("hom-set out of {object} not finite within word length {bound}")]
    HomSetNotFinite { object: String, bound: usize },

    #[error("enumeration exceeded the cap of {0} elements")]
    HomSetTooLarge(usize),

    #[error("not a discrete opfibration: {0}")]
    NotDiscreteOpfibration(String),

    #[error("object components do not extend: {0}")]
    NoExtension(String),

    #[error("middle model of the factorization is not cartesian: {0}")]
    MiddleNotCartesian(String),

    #[error("marked square is not a pullback: {0}")]
    MarkedSquareNotPullback(String),

    #[error("arity {arity} exceeds the truncation bound {bound}")]
    ArityOverflow { arity: usize, bound: usize },

    #[error("endpoint mismatch: {0}")]
    Mismatch(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error at {at}: {msg}")]
    Parse { at: String, msg: String },

    #[error("unknown fixture: {0}")]
    UnknownFixture(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(at: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Parse { at: at.into(), msg: msg.into() }
    }
}
