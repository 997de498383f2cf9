//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid fading parameters p={p}, r={r}: need 0 < r <= p < 1")]
    InvalidFadingParams { p: f64, r: f64 },

    #[error("invalid occupancy parameters: {0}")]
    InvalidOccupancyParams(String),

    #[error("persistence is defined for ages >= 1 (got {0})")]
    AgeOutOfDomain(u64),

    #[error("belief value {0} outside [0, 1]")]
    BeliefOutOfRange(f64),

    #[error("invalid model configuration: {0}")]
    InvalidConfig(String),

    #[error("channel {0} is busy and cannot be scheduled")]
    ChannelBusy(usize),

    #[error("action {0} is not feasible in this state")]
    InvalidAction(String),

    #[error("instance too large: {0}")]
    InstanceTooLarge(String),
}
