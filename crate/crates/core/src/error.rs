use crate::featuremap::Diagnostic;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unknown unit symbol `{symbol}` at position {position}")]
    UnknownUnitSymbol { symbol: String, position: usize },

    #[error("unit syntax error at position {position}: {message}")]
    UnitSyntax { position: usize, message: String },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("monomial has no nonzero feature exponent")]
    EmptyMonomial,

    #[error("transform `{transform}` applied to dimensional feature `{feature}`")]
    InvalidTransform { transform: String, feature: String },

    #[error("enumeration exceeded the candidate cap of {cap}")]
    BudgetExceeded { cap: usize },

    #[error("division by zero evaluating monomial {monomial} at row {row}")]
    DivisionByZero { row: usize, monomial: usize },

    #[error("non-finite value evaluating monomial {monomial} at row {row}")]
    NonFiniteResult { row: usize, monomial: usize },

    #[error("column {column} has zero scale")]
    ZeroScale { column: usize },

    #[error("unknown catalog `{0}`")]
    UnknownCatalog(String),

    #[error("feature map `{spec}` is dimensionally inconsistent:{}", format_diagnostics(.diagnostics))]
    DimensionMismatch {
        spec: String,
        diagnostics: Vec<Diagnostic>,
    },

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("empty matrix")]
    EmptyMatrix,

    #[error("column mismatch: expected {expected} columns, found {found}")]
    ColumnMismatch { expected: usize, found: usize },

    #[error("singular linear system")]
    SingularSystem,

    #[error("non-finite input")]
    NonFiniteInput,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("empty input")]
    Empty,

    #[error("non-binary label {value} at index {index}")]
    NonBinaryLabel { index: usize, value: f64 },

    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("invalid noise level {0}; expected 0 <= level < 1")]
    InvalidNoiseLevel(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn format_diagnostics(diagnostics: &[Diagnostic]) -> String {
    diagnostics.iter().map(|d| format!("\n  {d}")).collect()
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) | Error::Csv(_) | Error::Json(_) | Error::Format(_) => 3,
            Error::BudgetExceeded { .. } => 4,
            Error::DivisionByZero { .. }
            | Error::NonFiniteResult { .. }
            | Error::ZeroScale { .. }
            | Error::SingularSystem
            | Error::NonFiniteInput => 5,
            _ => 2,
        }
    }
}
