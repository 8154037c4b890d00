//! Orchestration of the determinacy pipeline and its command-line front end.

mod analyze;
mod cli;
mod report;
mod spec;

pub use analyze::{
    analyze, beta_table, beta_table_exact, isolated_pipeline, round_exponent, MAX_DENOMINATOR, ROUNDING_WINDOW, SAMPLED,
};
pub use cli::{run, run_with};
pub use report::{
    describe_sequence, DeterminacyReport, ExponentChoice, FitSummary, GSection, HypothesisCheck, KfSection,
    VerificationSummary,
};
pub use spec::{identity_germ, GStrategy, PlanConfig, ProblemConfig, ProblemSpec, StrategyConfig};

use determinacy::carleman::CarlemanError;
use determinacy::fitting::FittingError;
use determinacy::lojasiewicz::LojaError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DeterminacyError {
    #[error("invalid problem: {0}")]
    Invalid(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("f is not primitive for <psi>: {failure} has remainder {remainder}")]
    NotPrimitive { failure: String, remainder: String, checks: Vec<HypothesisCheck> },
    #[error("all maximal minors vanish: K_f = 0")]
    DegenerateIdeal { checks: Vec<HypothesisCheck> },
    #[error("g is not in K_f: remainder {remainder}")]
    GNotInIdeal { remainder: String, checks: Vec<HypothesisCheck> },
    #[error("gamma is not in the Jacobian ideal: remainder {remainder}")]
    GammaNotInJacobian { remainder: String },
    #[error("separation fit has only {bins} usable bins, {needed} needed")]
    InsufficientData { bins: usize, needed: usize, checks: Vec<HypothesisCheck> },
    #[error("separation not verified: worst log margin {worst_margin:.6} at {worst_point:?}")]
    SeparationUnverified { worst_margin: f64, worst_point: Vec<f64>, checks: Vec<HypothesisCheck> },
    #[error(transparent)]
    Fitting(#[from] FittingError),
    #[error(transparent)]
    Loja(#[from] LojaError),
    #[error(transparent)]
    Carleman(#[from] CarlemanError),
}

impl DeterminacyError {
    /// A hypothesis of the pipeline failed (as opposed to bad input).
    pub fn is_hypothesis_failure(&self) -> bool {
        matches!(
            self,
            DeterminacyError::NotPrimitive { .. }
                | DeterminacyError::DegenerateIdeal { .. }
                | DeterminacyError::GNotInIdeal { .. }
                | DeterminacyError::GammaNotInJacobian { .. }
                | DeterminacyError::InsufficientData { .. }
                | DeterminacyError::SeparationUnverified { .. }
        )
    }

    /// Checks completed before the failure.
    pub fn checks(&self) -> &[HypothesisCheck] {
        match self {
            DeterminacyError::NotPrimitive { checks, .. }
            | DeterminacyError::DegenerateIdeal { checks }
            | DeterminacyError::GNotInIdeal { checks, .. }
            | DeterminacyError::InsufficientData { checks, .. }
            | DeterminacyError::SeparationUnverified { checks, .. } => checks,
            _ => &[],
        }
    }
}
