use thiserror::Error;

/// Errors raised by the library.
///
/// Checker verdicts are not errors: a rejected certificate is reported
/// through [`crate::certificate::Verdict`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u32, right: u32 },

    #[error("word parse error at byte {position}: {message}")]
    WordParse { position: usize, message: String },

    #[error("invalid vertex {text:?} for degree {p}: {message}")]
    InvalidVertex {
        text: String,
        p: u32,
        message: String,
    },

    #[error("degree {0} is not an odd prime")]
    NotOddPrime(i64),

    #[error("defining vector has length {found}, expected {expected}")]
    WrongVectorLength { expected: usize, found: usize },

    #[error("defining vector is zero")]
    ZeroVector,

    #[error("group spec parse error: {0}")]
    SpecParse(String),

    #[error("group is not torsion (defining vector sums to {sum} mod {p})")]
    NotTorsion { p: u32, sum: u32 },

    #[error("order recursion exceeded depth cap {cap}")]
    DepthCapExceeded { cap: usize },

    #[error("element has infinite order (its orbit under power-and-section recursion revisits {witness})")]
    InfiniteOrder { witness: String },

    #[error("quotient at level {level} has {points} points, above the bound {bound}")]
    QuotientTooLarge {
        level: usize,
        points: u64,
        bound: u64,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("bound violated in {step}: got {found}, allowed {allowed}")]
    BoundViolation {
        step: String,
        found: usize,
        allowed: usize,
    },

    #[error("certificate parse error at byte {offset}: {message}")]
    CertificateParse { offset: usize, message: String },

    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
