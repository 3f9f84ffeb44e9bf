//! Random walks driven by a generator measure, their empirical measures, and
//! distances between point clouds.

mod dimension;
mod empirical;
mod measure;
mod metrics;

pub use dimension::box_dimension;
pub use empirical::{convolve_push, empirical_measure, ConvolveMode, EmpiricalMeasure, DEFAULT_CONVOLVE_BUDGET};
pub use measure::{AtomJson, WalkJson, WalkMeasure};
pub use metrics::{
    distance, invariance_residual, ks_distance, posterior_entropy, residual_report, stationarity_residual,
    weyl_coefficients, weyl_distance, Metric, ResidualReport, DEFAULT_FOURIER_CUTOFF,
};

use crate::dynamics::DynamicsError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WalkError {
    #[error("invalid walk measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("measures live on different spaces")]
    SpaceMismatch,
    #[error("exact convolution needs {needed} points, budget is {budget}")]
    BudgetExceeded { needed: usize, budget: usize },
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}
