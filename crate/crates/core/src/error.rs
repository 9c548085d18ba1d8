use thiserror::Error;

use crate::link::DeviceType;

/// Errors raised when an input violates a model precondition.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{field} must be finite, got {value}")]
    NonFinite { field: &'static str, value: f64 },

    #[error("{field} must be positive, got {value}")]
    NonPositive { field: &'static str, value: f64 },

    #[error("{field} = {value} is outside {range}")]
    OutOfRange {
        field: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("operation requires a device of type {expected}, got type {actual}")]
    WrongDeviceType {
        expected: &'static str,
        actual: DeviceType,
    },

    #[error("invalid tag profile: {0}")]
    InvalidTag(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid of {cells} cells exceeds the cap of {cap} cells")]
    GridTooLarge { cells: u64, cap: u64 },

    #[error("unknown preset '{name}', valid presets: {valid}")]
    UnknownPreset { name: String, valid: String },

    #[error("invalid deployment: {0}")]
    InvalidDeployment(String),

    #[error("sweep value list is empty")]
    EmptySweep,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn finite(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { field, value })
    }
}

pub(crate) fn positive(field: &'static str, value: f64) -> Result<f64> {
    finite(field, value)?;
    if value > 0.0 {
        Ok(value)
    } else {
        Err(Error::NonPositive { field, value })
    }
}
