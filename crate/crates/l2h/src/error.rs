use thiserror::Error;

/// Crate-wide error type. Variants mirror the failure modes of the
/// individual subsystems; most operations surface only a small subset.
#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),

    #[error("rewriting system is not locally confluent: words `{left}` and `{right}` do not join")]
    NonConfluentRewriting { left: String, right: String },

    #[error("rewriting rule `{0}` is not shortlex-reducing")]
    NonReducingRule(String),

    #[error("multiplication table is not a group: {0}")]
    BadTable(String),

    #[error("ball of radius {radius} exceeds cap of {cap} elements")]
    BallTooLarge { radius: usize, cap: usize },

    #[error("product support would exceed cap of {0} terms")]
    SupportCapExceeded(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("degree {degree} out of range 0..={max}")]
    DegreeOutOfRange { degree: usize, max: usize },

    #[error("relator `{0}` does not normalize to the identity in the given group")]
    RelatorNotTrivialInGroup(String),

    #[error("attachment vector {0} is not a cycle")]
    NotACycle(usize),

    #[error("quotient violates relator `{0}`")]
    RelatorViolation(String),

    #[error("no built-in or supplied resolution for this group class")]
    UnsupportedGroupForResolution,

    #[error("rapid-decay profile not applicable to this group")]
    ProfileNotApplicable,

    #[error("no candidate subset passed the quotient tests: {0}")]
    NoCandidateSubset(String),

    #[error("construction hypothesis not satisfied: {0}")]
    HypothesisNotSatisfied(String),

    #[error("unsupported presentation shape: {0}")]
    UnsupportedPresentation(String),

    #[error("{0}")]
    Invalid(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
