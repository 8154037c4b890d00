//! Numerical separation estimates between the complex zero set of `g` and a
//! real set `Y`: distances, envelope fits of `dist(x, Z_g) ≥ c·dist(x, Y)^s`
//! and verification of a proposed bound on fresh samples.

mod fit;
mod optimize;
mod set;
mod variety;

pub use fit::{
    directions, fit_pairs, fit_separation, geometric_radii, sample_distances, verify_separation, ExponentFit, Sample,
    SamplePlan, VerificationReport,
};
pub use optimize::{coordinate_descent, golden_section};
pub use set::{dist_to_set, ArcComponent, SetDescriptor, SetPiece};
pub use variety::{dist_to_variety, Branch, BranchComponent, DistanceEstimate, DistanceMethod, VarietyDescriptor};

use crate::algebra::AlgebraError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LojaError {
    #[error("point must be real")]
    NotReal,
    #[error("point has {got} coordinates, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid branch: {0}")]
    InvalidBranch(String),
    #[error("the parametrized method needs branch parametrizations")]
    NoBranches,
    #[error("invalid set: {0}")]
    InvalidSet(String),
    #[error("invalid sample plan: {0}")]
    InvalidPlan(String),
    #[error("only {bins} usable bins, at least {needed} needed")]
    InsufficientData { bins: usize, needed: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
