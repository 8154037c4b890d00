//! Weight sequences of Denjoy-Carleman classes: tameness, non-quasianalyticity,
//! the associated function `h_M`, admissible functions `θ` and the sequence
//! `M^{(θ)}` attached to a pair `(M, θ)`.

mod sequence;
mod theta;

pub use sequence::{
    check_nonqa, check_tame, default_grid, find_hsq_constant, h_eval, h_full, h_gevrey_exact, log_grid, HValue,
    NonQaReport, NonQaVerdict, TameReport, TameSequence, TameViolation,
};
pub use theta::{
    check_admissible, compare_sequences, default_tau_grid, growth_bound_constant, mtheta_closed,
    mtheta_closed_sequence, mtheta_numeric, sandwich_constants, AdmissibleFunction, AdmissibleReport, Comparison,
    Equivalence, MthetaNumeric,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CarlemanError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("sequence table is empty")]
    EmptyTable,
    #[error("sequence value {index} is not a positive finite number")]
    NonPositiveValue { index: usize },
    #[error("closed form requires a Gevrey-log sequence")]
    NotGevreyLog,
}
