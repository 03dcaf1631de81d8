use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("operands live in different fields: {left} vs {right}")]
    MixedFields { left: String, right: String },

    #[error("random sampling is only defined over prime fields")]
    SamplingUnsupported,

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("prime {0} is outside the supported range (2 < p < 2^31)")]
    PrimeOutOfRange(u64),

    #[error("multiplicity {multiplicity} is not below the characteristic {p}")]
    MultiplicityTooLarge { multiplicity: u32, p: u64 },

    #[error("ragged matrix: row {row} has {found} entries, expected {expected}")]
    RaggedRows { row: usize, expected: usize, found: usize },

    #[error("{op} is only supported for N = 2 (got N = {n})")]
    UnsupportedDimension { op: &'static str, n: usize },

    #[error("ambient dimensions differ: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },

    #[error("zero slice has no fixed divisor")]
    ZeroSlice,

    #[error("the zero ideal has no initial degree")]
    ZeroIdeal,

    #[error("point has all coordinates zero")]
    ZeroPoint,

    #[error("point has {found} coordinates, expected {expected}")]
    CoordinateCount { expected: usize, found: usize },

    #[error("duplicate point {point}")]
    DuplicatePoint { point: String },

    #[error("multiplicities must be positive (point {point})")]
    ZeroMultiplicity { point: String },

    #[error("degenerate hyperplane family: hyperplanes {subset:?} {reason}")]
    DegenerateStar { subset: Vec<usize>, reason: String },

    #[error("{what}: resampling exhausted after {attempts} attempts")]
    ResamplingExhausted { what: String, attempts: usize },

    #[error("could not certify a coprime pair in degree {degree} after {attempts} attempts")]
    CertificationFailed { degree: usize, attempts: usize },

    #[error("no fixed-component-free degree up to the ceiling {ceiling}; ideal may have height one")]
    BetaCeilingReached { ceiling: usize },

    #[error("witness in degree {degree} failed re-verification: {form}")]
    WitnessRejected { degree: usize, form: String },

    #[error("recomputation from scratch disagrees with the first run")]
    Irreproducible,

    #[error("unknown suite {0}")]
    UnknownSuite(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("serialization error: {0}")]
    Serialization(String),

    #[error("{case}: {source}")]
    InCase { case: String, source: Box<Error> },
}

impl Error {
    pub fn in_case(self, case: impl Into<String>) -> Self {
        Error::InCase { case: case.into(), source: Box::new(self) }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
