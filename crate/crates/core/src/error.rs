use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("matrix size {0} outside the supported range 2..=6")]
    UnsupportedSize(usize),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("non-finite entry in matrix")]
    NonFinite,

    #[error("determinant deviates from 1 by {0:e}")]
    NotUnimodular(f64),

    #[error("trace deviates from 0 by {0:e}")]
    NotTraceless(f64),

    #[error("rejection sampler exhausted its budget of {0} draws")]
    RejectionExhausted(usize),

    #[error("eigenvalue computation failed")]
    EigenFailure,

    #[error("word letter {letter} out of range for a free group of rank {rank}")]
    LetterOutOfRange { letter: i32, rank: usize },

    #[error("representation is not good: coboundary rank {rank} < {expected}")]
    NotGood { rank: usize, expected: usize },

    #[error("representation is not boundary-regular: restriction rank {rank} < {expected}")]
    NotBoundaryRegular { rank: usize, expected: usize },

    #[error("element is not regular")]
    NotRegular,

    #[error("bending element is not invariant (residual {0:e})")]
    NotInvariant(f64),

    #[error("degenerate spectrum: eigenvalues {0} and {1} coincide")]
    DegenerateSpectrum(usize, usize),

    #[error("genericity margin violated: |{name}| = {value:e} <= {margin}")]
    MarginViolation {
        name: String,
        value: f64,
        margin: f64,
    },

    #[error("wrong number of tangent vectors: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("basis does not match the cohomology space: {0}")]
    BasisMismatch(String),

    #[error("unknown form key `{0}`")]
    UnknownForm(String),

    #[error("unknown surface `{0}`")]
    UnknownSurface(String),

    #[error("unknown scenario `{name}`; registered: {registered}")]
    UnknownScenario { name: String, registered: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
