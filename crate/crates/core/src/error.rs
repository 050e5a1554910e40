use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("spin must be a positive multiple of 1/2, got {0}")]
    InvalidSpin(String),
    #[error("representation dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
    #[error("tabulated path: {0}")]
    TabulatedPath(String),
    #[error("path is stationary at t = {t} (|dn/dt| = {speed:e}); frame initial condition undefined")]
    StationaryStart { t: f64, speed: f64 },
    #[error("path is stationary at interior time t = {t}; class-i field needs |dn/dt| > 0")]
    StationaryInterior { t: f64 },
    #[error("path is not closed: |n(T) - n(0)| = {gap:e}")]
    OpenPath { gap: f64 },
    #[error("no usable pole for the solid-angle integral after {tried} candidates")]
    NoPole { tried: usize },
    #[error("time {t} outside path domain [0, {end})")]
    OutsideDomain { t: f64, end: f64 },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
