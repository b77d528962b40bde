use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids ({left} vs {right})")]
    GridMismatch { left: String, right: String },

    #[error("expected {expected} component(s), got {found}")]
    ComponentMismatch { expected: usize, found: usize },

    #[error("operation requires dim = {expected}, grid has dim = {found}")]
    WrongDimension { expected: usize, found: usize },

    #[error("Lebesgue exponent must lie in [1, inf], got {0}")]
    InvalidExponent(f64),

    #[error("field has nonzero mean {0:e}")]
    NonzeroMean(f64),

    #[error("field is not divergence-free: relative divergence {0:e}")]
    NotSolenoidal(f64),

    #[error("shell index {q} outside [{min}, {max}]")]
    ShellOutOfRange { q: i32, min: i32, max: i32 },

    #[error("invalid band ({p}, {q}]")]
    InvalidBand { p: i32, q: i32 },

    #[error("field is not localized in shell {0}")]
    NotShellLocalized(i32),

    #[error("non-finite value in field `{field}` at t = {t}")]
    NonFinite { field: String, t: f64 },

    #[error("intermittency dimension sigma must lie in [0, 3], got {0}")]
    InvalidSigma(f64),

    #[error("series shorter than 4 samples ({0} given)")]
    SeriesTooShort(usize),

    #[error("empty exponent set")]
    EmptyRSet,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("missing shells: {0}")]
    MissingShells(String),

    #[error("system mismatch: {0}")]
    SystemMismatch(String),
}
