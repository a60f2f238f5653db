use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid material set: {0}")]
    InvalidMaterials(String),

    #[error("invalid gauge configuration: {0}")]
    InvalidGauge(String),

    #[error("invalid waveform: {0}")]
    InvalidWaveform(String),

    #[error("invalid experiment plan: {0}")]
    InvalidPlan(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unknown unit `{unit}` for {dimension}")]
    Unit { unit: String, dimension: &'static str },

    #[error("unphysical thermal parameter set: denominator {0:e} <= 0")]
    ThermalDenominator(f64),

    #[error("non-physical resistance: 1 + k*eps = {0} <= 0")]
    NegativeResistance(f64),

    #[error("zero conducting area")]
    ZeroArea,

    #[error("divider voltage {voltage} V outside (0, {supply}) V: channel saturated or open")]
    VoltageOutOfRange { voltage: f64, supply: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("too few cycles: need {needed}, found {found}")]
    TooFewCycles { needed: usize, found: usize },

    #[error(transparent)]
    Record(#[from] RecordError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors caused by bad inputs (files, flags, units) rather than by the physics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::Unit { .. }
                | Error::Record(_)
                | Error::Io(_)
                | Error::Json(_)
        )
    }
}

/// Problems found while reading a time-series CSV. Line numbers are 1-based.
#[derive(Debug, Error, PartialEq)]
pub enum RecordError {
    #[error("line {line}: malformed header: {reason}")]
    MalformedHeader { line: u64, reason: String },

    #[error("line {line}: column `{column}` has unit `{found}`, expected `{expected}`")]
    UnitMismatch {
        line: u64,
        column: String,
        expected: String,
        found: String,
    },

    #[error("line {line}: expected {expected} fields, found {found}")]
    FieldCount {
        line: u64,
        expected: usize,
        found: usize,
    },

    #[error("line {line}: column `{column}`: cannot parse `{value}` as a number")]
    InvalidNumber {
        line: u64,
        column: String,
        value: String,
    },

    #[error("line {line}: column `{column}` must be finite")]
    MissingValue { line: u64, column: String },

    #[error("line {line}: time {time} does not increase (previous {previous})")]
    NonMonotoneTime { line: u64, time: f64, previous: f64 },

    #[error("empty record")]
    Empty,

    #[error("csv: {0}")]
    Csv(String),
}
