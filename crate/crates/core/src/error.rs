use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("operands mix rational and complex scalars")]
    MixedDomains,

    #[error("matrix must be square and non-empty (got {rows} rows, row lengths {detail})")]
    BadShape { rows: usize, detail: String },

    #[error("trace word must be non-empty")]
    EmptyWord,

    #[error("invalid trace word letter {0:?}")]
    BadLetter(char),

    #[error("matrix is not traceless")]
    NotTraceless,

    #[error("abscissae must be pairwise distinct (x[{0}] == x[{1}])")]
    RepeatedAbscissa(usize, usize),

    #[error("construction check failed: {0}")]
    Construction(String),

    #[error("theta matrix must have determinant 1")]
    NotUnimodular,

    #[error("move not supported at tuple level: {0}")]
    UnsupportedMove(String),

    #[error("tuple-level action needs tr(X) = tr(Y) = 0")]
    NonzeroTranslation,

    #[error("ambiguous zero test in {context}: |z| = {magnitude:e} lies inside the guard band [{lower:e}, {upper:e}]")]
    Ambiguous {
        context: String,
        magnitude: f64,
        lower: f64,
        upper: f64,
    },

    #[error("input is not on the variety: {relation} residual {magnitude:e}")]
    OffVariety { relation: String, magnitude: f64 },

    #[error("case dispatch failed at {step}; branch log: {log:?}")]
    CaseDispatch { step: String, log: Vec<String> },

    #[error("unknown identity id {0:?}")]
    UnknownIdentity(String),

    #[error("identity manifest: {0}")]
    Manifest(String),

    #[error("expression {expr:?}: {message}")]
    Expression { expr: String, message: String },

    #[error("json: {0}")]
    Json(String),

    #[error("old and new defining relations disagree on a realized tuple (difference {0})")]
    RelationMismatch(String),

    #[error("invalid tolerance: {0}")]
    Tolerance(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
