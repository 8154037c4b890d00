use std::fmt::Write as _;

use determinacy::carleman::{AdmissibleFunction, TameSequence};
use serde::Serialize;

/// One exact or sampled check with its outcome.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl HypothesisCheck {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        HypothesisCheck { name: name.into(), passed, detail: detail.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KfSection {
    /// Nonzero maximal minors of `λ`.
    pub minors: Vec<String>,
    /// Reduced Gröbner basis (grevlex) of the ideal they generate.
    pub basis: Vec<String>,
    pub unit_ideal: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GSection {
    pub strategy: String,
    pub g: String,
    /// Cofactors `c_i` with `g = Σ c_i · minor_i`.
    pub certificate: Vec<String>,
    pub zero_set_empty: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitSummary {
    pub s_hat: f64,
    pub c_hat: f64,
    pub nu_hat: Option<f64>,
    pub residual: f64,
    pub bins: usize,
    pub trimmed: usize,
    pub samples: usize,
    pub unconverged: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentChoice {
    /// Exponent used in `θ`.
    pub s: f64,
    /// `p/q` when `s` was rounded to a rational.
    pub rational: Option<String>,
    pub s_hat: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationSummary {
    pub ok: bool,
    pub checked: usize,
    pub violations: usize,
    pub worst_margin: f64,
    pub worst_point: Vec<f64>,
    pub wording: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeterminacyReport {
    pub variables: Vec<String>,
    pub f: String,
    pub psi: Vec<String>,
    pub y: String,
    pub sequence: TameSequence,
    pub hypotheses: Vec<HypothesisCheck>,
    pub kf: KfSection,
    pub g: GSection,
    pub fit: Option<FitSummary>,
    pub exponent: ExponentChoice,
    pub theta: AdmissibleFunction,
    pub verification: Option<VerificationSummary>,
    pub target: TameSequence,
    /// How `target` was obtained: closed form or numeric sup over a grid.
    pub target_method: String,
    pub conclusion: String,
    pub warnings: Vec<String>,
}

pub fn describe_sequence(m: &TameSequence) -> String {
    match m {
        TameSequence::GevreyLog { alpha, beta } => format!("GevreyLog(alpha = {}, beta = {})", num(*alpha), num(*beta)),
        TameSequence::Tabulated { log_values } => format!("table of {} values", log_values.len()),
    }
}

pub fn describe_theta(t: &AdmissibleFunction) -> String {
    let mut s = format!("{}·t^{}", num(t.c), num(t.mu));
    if t.nu != 0.0 {
        let _ = write!(s, "·ln(1+1/t)^(-{})", num(t.nu));
    }
    s
}

/// Integers plainly, other values with at most six decimals.
pub fn num(x: f64) -> String {
    if x == x.round() && x.abs() < 1e15 {
        return format!("{}", x as i64);
    }
    let s = format!("{x:.6}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub(crate) fn sci(x: f64) -> String {
    format!("{x:.6e}")
}

impl DeterminacyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        let _ = writeln!(w, "determinacy report");
        let _ = writeln!(w, "variables: {}", self.variables.join(", "));
        let _ = writeln!(w, "f = {}", self.f);
        let _ = writeln!(w, "psi = ({})", self.psi.join(", "));
        let _ = writeln!(w, "Y = {}", self.y);
        let _ = writeln!(w, "M = {}", describe_sequence(&self.sequence));
        let _ = writeln!(w, "\nhypotheses");
        for h in &self.hypotheses {
            let _ = writeln!(w, "  [{}] {}: {}", if h.passed { "pass" } else { "FAIL" }, h.name, h.detail);
        }
        let _ = writeln!(w, "\nK_f: {} nonzero maximal minors", self.kf.minors.len());
        for (i, m) in self.kf.minors.iter().enumerate() {
            let _ = writeln!(w, "  m{} = {}", i + 1, m);
        }
        let _ = writeln!(
            w,
            "reduced basis ({} elements){}",
            self.kf.basis.len(),
            if self.kf.unit_ideal { ", unit ideal" } else { "" }
        );
        for (i, b) in self.kf.basis.iter().enumerate() {
            let _ = writeln!(w, "  b{} = {}", i + 1, b);
        }
        let _ = writeln!(w, "\ng ({}) = {}", self.g.strategy, self.g.g);
        let nonzero = self.g.certificate.iter().filter(|c| c.as_str() != "0").count();
        let _ = writeln!(w, "  certificate: g = Σ c_i·m_i with {nonzero} nonzero cofactors, checked exactly");
        if self.g.zero_set_empty {
            let _ = writeln!(w, "  Z_g is empty: no separation constraint");
        }
        if let Some(fit) = &self.fit {
            let _ = writeln!(w, "\nseparation fit dist(x, Z_g) ≈ c·dist(x, Y)^s");
            let _ = writeln!(
                w,
                "  s_hat = {}  c_hat = {}  residual = {}",
                num(fit.s_hat),
                sci(fit.c_hat),
                num(fit.residual)
            );
            if let Some(nu) = fit.nu_hat {
                let _ = writeln!(w, "  nu_hat = {}", num(nu));
            }
            let _ = writeln!(
                w,
                "  {} envelope bins ({} trimmed), {} samples, {} unconverged",
                fit.bins, fit.trimmed, fit.samples, fit.unconverged
            );
        }
        match &self.exponent.rational {
            Some(r) => {
                let _ = writeln!(w, "exponent s = {r}");
            }
            None => {
                let _ = writeln!(w, "exponent s = {}", num(self.exponent.s));
            }
        }
        let _ = writeln!(w, "theta(t) = {}", describe_theta(&self.theta));
        if let Some(v) = &self.verification {
            let _ = writeln!(
                w,
                "\n{}: {} points, {} violations, worst log margin {} at ({})",
                v.wording,
                v.checked,
                v.violations,
                num(v.worst_margin),
                v.worst_point.iter().map(|x| sci(*x)).collect::<Vec<_>>().join(", ")
            );
        }
        let _ = writeln!(w, "\ntarget M^(theta) = {} ({})", describe_sequence(&self.target), self.target_method);
        let _ = writeln!(w, "conclusion: {}", self.conclusion);
        if !self.warnings.is_empty() {
            let _ = writeln!(w, "\nwarnings");
            for x in &self.warnings {
                let _ = writeln!(w, "  - {x}");
            }
        }
        out
    }
}
