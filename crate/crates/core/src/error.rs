use thiserror::Error;

/// Every failure the library can report.
///
/// Variant names are part of the public contract: the CLI prints them verbatim
/// so scripts can match on e.g. `OutOfRange`.
#[derive(Debug, Error)]
pub enum Error {
    #[error("SizeTooSmall: {0}")]
    SizeTooSmall(String),
    #[error("IrrationalFrequency: {0}")]
    IrrationalFrequency(String),
    #[error("WavelengthOutOfRange: {wavelength} nm outside calibrated range [{min}, {max}] nm")]
    WavelengthOutOfRange { wavelength: f64, min: f64, max: f64 },
    #[error("InvalidSpec: {0}")]
    InvalidSpec(String),

    #[error("GridTooCoarse: {0}")]
    GridTooCoarse(String),
    #[error("NotGuided: {0}")]
    NotGuided(String),
    #[error("InsufficientSamples: {0}")]
    InsufficientSamples(String),
    #[error("NonPositiveCoupling: {0}")]
    NonPositiveCoupling(String),
    #[error("CouplingTooStrong: coupling {coupling} per cm exceeds A = {max} per cm")]
    CouplingTooStrong { coupling: f64, max: f64 },
    #[error("OverlapError: {0}")]
    OverlapError(String),

    #[error("NotHermitian: max |H - H^dagger| = {0:e}")]
    NotHermitian(f64),
    #[error("DimensionMismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("GapClosure: {0}")]
    GapClosure(String),

    #[error("StepTooLarge: {0}")]
    StepTooLarge(String),
    #[error("OutOfRange: {0}")]
    OutOfRange(String),
    #[error("NotNormalized: {0}")]
    NotNormalized(String),

    #[error("UnknownStrategy: no {kind} named {name:?} (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },
    #[error("Config: {0}")]
    Config(String),
    #[error("Parse: {0}")]
    Parse(String),
    #[error("Io: {0}")]
    Io(#[from] std::io::Error),
    #[error("Csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("Json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// The variant name, e.g. `"OutOfRange"`.
    pub fn name(&self) -> &'static str {
        match self {
            Error::SizeTooSmall(_) => "SizeTooSmall",
            Error::IrrationalFrequency(_) => "IrrationalFrequency",
            Error::WavelengthOutOfRange { .. } => "WavelengthOutOfRange",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::GridTooCoarse(_) => "GridTooCoarse",
            Error::NotGuided(_) => "NotGuided",
            Error::InsufficientSamples(_) => "InsufficientSamples",
            Error::NonPositiveCoupling(_) => "NonPositiveCoupling",
            Error::CouplingTooStrong { .. } => "CouplingTooStrong",
            Error::OverlapError(_) => "OverlapError",
            Error::NotHermitian(_) => "NotHermitian",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::GapClosure(_) => "GapClosure",
            Error::StepTooLarge(_) => "StepTooLarge",
            Error::OutOfRange(_) => "OutOfRange",
            Error::NotNormalized(_) => "NotNormalized",
            Error::UnknownStrategy { .. } => "UnknownStrategy",
            Error::Config(_) => "Config",
            Error::Parse(_) => "Parse",
            Error::Io(_) => "Io",
            Error::Csv(_) => "Csv",
            Error::Json(_) => "Json",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
