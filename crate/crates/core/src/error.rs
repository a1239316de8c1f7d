use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    InvalidPrime(u32),

    #[error("generator `{name}` of kind {kind} has total degree {degree} with the wrong parity")]
    ParityViolation {
        name: String,
        kind: String,
        degree: u32,
    },

    #[error("generator `{0}` has total degree 0")]
    ZeroDegree(String),

    #[error("duplicate generator name `{0}`")]
    DuplicateName(String),

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("elements belong to different algebras")]
    MixedSpec,

    #[error("image of `{name}` is not homogeneous of degree {expected}")]
    DegreeMismatch { name: String, expected: i64 },

    #[error("matrix shapes are incompatible: {0}")]
    DimensionMismatch(String),

    #[error("composite of consecutive differentials is nonzero")]
    CompositionNonzero,

    #[error("generator `{0}` has a kind the resolution does not support")]
    UnsupportedKind(String),

    #[error("unsupported module shape: {0}")]
    UnsupportedShape(String),

    #[error("d o d is nonzero on {0}")]
    NotADifferential(String),

    #[error("rule on {source_desc} has bidegree shift ({ds}, {dt}), expected ({es}, {et})")]
    BidegreeViolation {
        source_desc: String,
        ds: i64,
        dt: i64,
        es: i64,
        et: i64,
    },

    #[error("Leibniz extension disagrees on {0}")]
    LeibnizConflict(String),

    #[error("rule family fails at k = {k}: computed {value}")]
    FamilyViolation { k: u32, value: String },

    #[error("dimension mismatch in degree {degree}: expected {expected}, found {actual}")]
    DimMismatch {
        degree: u32,
        expected: usize,
        actual: usize,
    },

    #[error("extension rule is not degree-consistent: {0}")]
    ExtensionDegreeError(String),

    #[error("rewriting did not terminate within {0} steps")]
    NonTermination(usize),

    #[error("sequence is not exact in degree {degree} at {joint}: im {image}, ker {kernel}")]
    InexactAt {
        degree: u32,
        joint: String,
        image: usize,
        kernel: usize,
    },

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("parse error: {0}")]
    Parse(String),
}
