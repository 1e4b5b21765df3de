use crate::model::{Mode, NodeId};
use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("alpha {alpha} is outside the valid range [{low}, 1] for {mode} mode")]
    AlphaOutOfRange { alpha: String, low: String, mode: Mode },

    #[error("cannot parse trust parameter {0:?}")]
    BadAlpha(String),

    #[error("node {0} is outside 1..={1}")]
    NodeOutOfRange(NodeId, usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("infeasible prediction request: {0}")]
    InfeasiblePrediction(String),

    #[error("signature for honest node {0} requested by the adversary")]
    Forgery(NodeId),

    #[error("adversary tried to send as honest node {0}")]
    Impersonation(NodeId),

    #[error("strategy rejected: {0}")]
    StrategyRejected(String),

    #[error("honest nodes undecided after the round budget of {0}")]
    RoundBudgetExceeded(u32),

    #[error("infeasible construction: {0}")]
    Infeasible(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
