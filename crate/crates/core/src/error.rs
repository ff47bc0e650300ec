use std::fmt;

/// Crate-wide error type.
///
/// Variants are grouped by origin: element arithmetic (`ZeroInverse`,
/// `NonUnit`), shape and domain checks (`DimensionMismatch`,
/// `FieldMismatch`, `BadField`), parsing (`SyntaxError`,
/// `NonHomogeneous`, `UnknownVariable`), search and pipeline conditions
/// (`TooLarge`, `BudgetExhausted`, `PreconditionViolated`), and
/// transform or certificate validation (`SingularTransform`,
/// `WitnessInvalid`, `NotAZero`, ...).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Inverse of zero requested.
    ZeroInverse,
    /// Inverse of a non-unit requested in Z/p^k.
    NonUnit,
    /// Operand shapes do not match.
    DimensionMismatch(String),
    /// Operands belong to different coefficient domains.
    FieldMismatch(String),
    /// Invalid field description: bad prime, reducible modulus, size cap.
    BadField(String),
    /// Parse failure at a 1-based line and column.
    SyntaxError { line: usize, col: usize, msg: String },
    /// A term of total degree other than two.
    NonHomogeneous { line: usize, col: usize, msg: String },
    /// A variable outside the declared x1..xn.
    UnknownVariable { line: usize, col: usize, msg: String },
    /// Enumeration domain exceeds the supported cap.
    TooLarge(String),
    /// Node or sample budget exhausted before a certified answer.
    BudgetExhausted(String),
    /// A stated precondition does not hold.
    PreconditionViolated(String),
    /// A transform matrix with vanishing determinant.
    SingularTransform,
    /// A claimed witness fails replay.
    WitnessInvalid(String),
    /// System rejected by the minimizer (for example a form that is
    /// identically zero over Q).
    DegenerateSystem(String),
    /// Lift seed whose Jacobian rank mod p is not maximal.
    SingularSeed(String),
    /// A coefficient with negative p-valuation where integrality is
    /// required.
    NonIntegral(String),
    /// A claimed solution fails exact re-evaluation.
    NotAZero(String),
    /// Zero argument where a nonzero one is required.
    ZeroArgument(String),
    /// Input or output failure in a front end.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ZeroInverse => write!(f, "inverse of zero"),
            Error::NonUnit => write!(f, "inverse of a non-unit in Z/p^k"),
            Error::DimensionMismatch(m) => write!(f, "dimension mismatch: {m}"),
            Error::FieldMismatch(m) => write!(f, "field mismatch: {m}"),
            Error::BadField(m) => write!(f, "bad field description: {m}"),
            Error::SyntaxError { line, col, msg } => {
                write!(f, "syntax error at {line}:{col}: {msg}")
            }
            Error::NonHomogeneous { line, col, msg } => {
                write!(f, "non-homogeneous term at {line}:{col}: {msg}")
            }
            Error::UnknownVariable { line, col, msg } => {
                write!(f, "unknown variable at {line}:{col}: {msg}")
            }
            Error::TooLarge(m) => write!(f, "domain too large: {m}"),
            Error::BudgetExhausted(m) => write!(f, "budget exhausted: {m}"),
            Error::PreconditionViolated(m) => write!(f, "precondition violated: {m}"),
            Error::SingularTransform => write!(f, "singular transform matrix"),
            Error::WitnessInvalid(m) => write!(f, "invalid witness: {m}"),
            Error::DegenerateSystem(m) => write!(f, "degenerate system: {m}"),
            Error::SingularSeed(m) => write!(f, "singular seed: {m}"),
            Error::NonIntegral(m) => write!(f, "non-integral coefficients: {m}"),
            Error::NotAZero(m) => write!(f, "claimed zero fails replay: {m}"),
            Error::ZeroArgument(m) => write!(f, "zero argument: {m}"),
            Error::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
