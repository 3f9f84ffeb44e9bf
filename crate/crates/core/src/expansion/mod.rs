//! Average expansion `σ(ξ, N)` of planes under a random walk, and scans over
//! Grassmannians for uniform expansion and uniform gaps.

mod plane;
mod scan;
mod sigma;

pub use plane::PlaneSpec;
pub use scan::{uniform_expansion_scan, uniform_gaps_scan, ExpansionReport, GapGrid, PlaneGrid, ScanRow};
pub use sigma::{sigma, sigma_frame, SigmaEstimate, SigmaMode, DEFAULT_WORD_BUDGET};

use crate::dynamics::DynamicsError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExpansionError {
    #[error("exact mode needs {words} words, budget is {budget}")]
    BudgetExceeded { words: u128, budget: u64 },
    #[error("invalid plane: {0}")]
    InvalidPlane(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}
