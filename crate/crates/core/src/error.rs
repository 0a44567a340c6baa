use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point lies outside the domain")]
    OutsideDomain,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("spacing h = {h} exceeds the domain diameter {diameter}")]
    SpacingTooLarge { h: f64, diameter: f64 },

    #[error("grid graph does not connect the sampled pair; resolution too coarse")]
    Disconnected,

    #[error("space/grid incompatibility: {0}")]
    Incompatible(String),

    #[error("could not bracket the Luxemburg scale: {0}")]
    Bracket(String),

    #[error("scale nu = {nu} outside the admissible range (0, {nu_max}) = (0, min{{n/p, 1}})")]
    NuOutOfRange { nu: f64, nu_max: f64 },

    #[error("field carries no gradient values")]
    MissingGradient,

    #[error("schedule needs at least {min} points, got {got}")]
    ScheduleTooShort { min: usize, got: usize },

    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
