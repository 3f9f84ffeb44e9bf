//! Concrete generators with closed-form Jacobians, tangent cocycles along words,
//! and finite-time Lyapunov diagnostics.

mod cocycle;
mod contraction;
mod exact;
mod lyapunov;
mod oseledets;
mod system;

pub use cocycle::TangentCocycle;
pub use contraction::{contraction_check, ContractionLog, DEFAULT_CHART_SIZE};
pub use exact::{lyapunov_exact, supports_exact};
pub use lyapunov::{lyapunov_many, lyapunov_qr, lyapunov_qr_after, lyapunov_with, LyapunovMethod, LyapunovReport};
pub use oseledets::{flag_from_jacobians, oseledets_flag, subspace_angle, OseledetsFlag};
pub use system::{wrap, CompiledMap, IntMatrix, SpaceKind, SystemSpec, TrigTerm};

use rand::Rng;

use crate::walk::WalkMeasure;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DynamicsError {
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("point {0:?} is outside the domain")]
    PointOutsideDomain(Vec<f64>),
    #[error("expected a point of dimension {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-invertible Jacobian at step {step}")]
    NonInvertibleJacobian { step: usize },
    #[error("exponent gap {gap:.3e} after index {index} is below the threshold")]
    GapTooSmall { index: usize, gap: f64 },
    #[error("step count must be at least 1")]
    NoSteps,
}

/// Where the generator applied at each step comes from.
#[derive(Debug, Clone, Copy)]
pub enum WordSource<'a> {
    /// The same map every step.
    Fixed(&'a SystemSpec),
    /// An independent draw from the walk measure every step.
    Walk(&'a WalkMeasure),
}

impl<'a> WordSource<'a> {
    pub fn space(&self) -> SpaceKind {
        match self {
            WordSource::Fixed(g) => g.space(),
            WordSource::Walk(m) => m.space(),
        }
    }

    pub fn dim(&self) -> usize {
        self.space().dim()
    }

    pub fn is_deterministic(&self) -> bool {
        match self {
            WordSource::Fixed(_) => true,
            WordSource::Walk(m) => m.len() == 1,
        }
    }

    pub fn next<R: Rng + ?Sized>(&self, rng: &mut R) -> &'a SystemSpec {
        match self {
            WordSource::Fixed(g) => g,
            WordSource::Walk(m) => m.generator(m.sample_index(rng)),
        }
    }
}
