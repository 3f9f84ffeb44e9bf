//! Exact algebra of subresonant polynomial maps on filtered vector spaces.
//!
//! Coordinates carry positive rational weights; a polynomial self-map is
//! subresonant when every monomial in output `j` has weight at most the weight of
//! coordinate `j`, and its graded linear part is invertible. These maps form a
//! finite-dimensional group, acted on faithfully by their linearization on the
//! monomials of weight at most the top weight.

mod exact;
mod fibered;
mod group;
mod json;
mod linearize;
mod poly;
pub mod rational;
mod space;

pub use exact::{identity as rat_identity, inverse as rat_inverse, matmul as rat_matmul, matvec as rat_matvec, RatMatrix};
pub use fibered::{validate_fibered, FiberTerm, FiberedCocycleMap};
pub use group::{act, compose, conjugate, invert, validate, SubresonantMap};
pub use json::{map_to_json, parse_map, CoeffEntry, MapDocument};
pub use linearize::{embed, linearization_basis, linearize, LinearizationMatrix};
pub use poly::{Polynomial, PolynomialMap, Scalar};
pub use rational::Rational;
pub use space::{FilteredSpace, MultiIndex};

use rational::format_rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SubresError {
    #[error("malformed filtered space: {0}")]
    MalformedSpace(String),
    #[error("coordinate {index} out of range for dimension {dim}")]
    InvalidCoordinate { index: usize, dim: usize },
    #[error("expected {expected} coordinates, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("maps live on different filtered spaces")]
    SpaceMismatch,
    #[error("resonance violation: monomial {monomial} in output {output} is heavier than the output coordinate")]
    ResonanceViolation { output: usize, monomial: MultiIndex },
    #[error("map is not strictly subresonant: monomial {monomial} in output {output}")]
    NotStrict { output: usize, monomial: MultiIndex },
    #[error("graded linear part is singular on the weight {} block", format_rational(.weight))]
    SingularGradedPart { weight: Rational },
    #[error("map has constant terms; linearize with the affine flag")]
    AffineRequired,
    #[error("malformed cocycle: {0}")]
    MalformedCocycle(String),
}
