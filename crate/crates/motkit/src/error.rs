//! Error type shared by all toolkit modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A value that must be finite was NaN or infinite.
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// All class weights were zero, so no normalized vector exists.
    #[error("degenerate class evidence")]
    DegenerateClassEvidence,

    /// Negative prediction horizon.
    #[error("negative prediction horizon dt = {0}")]
    NegativeDt(f64),

    /// A negative process-noise intensity was configured.
    #[error("negative process noise intensity {0}")]
    NegativeNoiseIntensity(f64),

    /// A linear transition matrix was requested for a nonlinear model.
    #[error("{0} has no linear transition matrix; use predict")]
    NonlinearModel(&'static str),

    /// Innovation covariance could not be inverted.
    #[error("degenerate innovation covariance")]
    DegenerateInnovation,

    /// Detection and object share no observed state components.
    #[error("non-overlapping state masks")]
    DisjointMasks,

    /// A probability or confidence outside its valid range.
    #[error("{name} = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    /// A detection lacked the minimum observed components (position, length, width).
    #[error("detection is missing required components: {0}")]
    MissingComponents(&'static str),

    /// Cycle timestamps must strictly increase.
    #[error("non-monotone cycle time: {now} <= {previous}")]
    NonMonotoneTime { now: f64, previous: f64 },

    /// Arrival time earlier than the sensor timestamp it carries.
    #[error("arrival time {arrival} precedes sensor timestamp {sensor}")]
    ClockViolation { arrival: f64, sensor: f64 },

    /// Scenario or pipeline configuration failed validation.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Configuration file could not be parsed.
    #[error("config parse error: {0}")]
    ConfigParse(String),

    /// A record line could not be parsed.
    #[error("record parse error: {0}")]
    RecordParse(String),

    /// Input/output failure while reading or writing streams.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
