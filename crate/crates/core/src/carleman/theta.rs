use serde::{Deserialize, Serialize};

use super::sequence::{fit_slope, h_full, log_grid, TameSequence};
use super::CarlemanError;

/// `θ(t) = c · t^μ · (ln(1 + 1/t))^{-ν}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleFunction {
    pub c: f64,
    pub mu: f64,
    pub nu: f64,
}

impl AdmissibleFunction {
    pub fn new(c: f64, mu: f64, nu: f64) -> Result<Self, CarlemanError> {
        if !(c.is_finite() && mu.is_finite() && nu.is_finite() && c > 0.0 && mu > 0.0 && nu >= 0.0) {
            return Err(CarlemanError::InvalidParameter(format!("c={c}, mu={mu}, nu={nu}")));
        }
        Ok(AdmissibleFunction { c, mu, nu })
    }

    pub fn power(s: f64) -> Self {
        AdmissibleFunction { c: 1.0, mu: s, nu: 0.0 }
    }

    pub fn ln_eval(&self, t: f64) -> f64 {
        let mut v = self.c.ln() + self.mu * t.ln();
        if self.nu != 0.0 {
            v -= self.nu * (1.0 / t).ln_1p().ln();
        }
        v
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.ln_eval(t).exp()
    }

    /// `θ^{-1}(τ)` by bisection in `ln t` on `[1e-12, 1]`, to `1e-12` in log
    /// scale. Values outside the bracket are clamped; the flag reports a
    /// clamp at the lower end.
    pub fn inverse(&self, tau: f64) -> (f64, bool) {
        let target = tau.ln();
        let (mut lo, mut hi) = (1e-12f64.ln(), 0.0f64);
        if self.ln_eval(lo.exp()) >= target {
            return (lo.exp(), true);
        }
        if self.ln_eval(hi.exp()) <= target {
            return (1.0, false);
        }
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if self.ln_eval(mid.exp()) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        ((0.5 * (lo + hi)).exp(), false)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdmissibleReport {
    pub ok: bool,
    /// `θ(t)/t` non-decreasing on the grid.
    pub increasing_ok: bool,
    /// Smallest exponent among `μ, μ+ν, μ+ν+1` with `θ(t)/t^s`
    /// non-increasing on the grid.
    pub s: Option<f64>,
    /// First grid point where a check fails.
    pub first_violation: Option<f64>,
}

/// Checks admissibility of `θ` on a grid in `(0, ε)`. Monotonicity is tested
/// non-strictly with a log-scale tolerance of `1e-12`, so `θ(t) = ct` passes.
pub fn check_admissible(theta: &AdmissibleFunction, grid: &[f64]) -> AdmissibleReport {
    let mut g: Vec<f64> = grid.iter().copied().filter(|t| *t > 0.0).collect();
    g.sort_by(f64::total_cmp);
    let tol = 1e-12;
    let ratio = |s: f64, t: f64| theta.ln_eval(t) - s * t.ln();
    let violation = |s: f64, increasing: bool| -> Option<f64> {
        g.windows(2).find_map(|w| {
            let (a, b) = (ratio(s, w[0]), ratio(s, w[1]));
            let bad = if increasing { b < a - tol * (1.0 + a.abs()) } else { b > a + tol * (1.0 + a.abs()) };
            bad.then_some(w[1])
        })
    };
    let inc = violation(1.0, true);
    let candidates = [theta.mu, theta.mu + theta.nu, theta.mu + theta.nu + 1.0];
    let s = candidates.iter().copied().filter(|s| *s >= 1.0).find(|&s| violation(s, false).is_none());
    let first_violation = inc.or_else(|| if s.is_none() { violation(candidates[2].max(1.0), false) } else { None });
    AdmissibleReport { ok: inc.is_none() && s.is_some(), increasing_ok: inc.is_none(), s, first_violation }
}

/// Closed form of `M^{(θ)}` within the Gevrey-log family: `(αμ, βμ + ν)`.
pub fn mtheta_closed(alpha: f64, beta: f64, theta: &AdmissibleFunction) -> (f64, f64) {
    (alpha * theta.mu, beta * theta.mu + theta.nu)
}

/// Sequence form of [`mtheta_closed`].
pub fn mtheta_closed_sequence(m: &TameSequence, theta: &AdmissibleFunction) -> Result<TameSequence, CarlemanError> {
    match m {
        TameSequence::GevreyLog { alpha, beta } => {
            let (a, b) = mtheta_closed(*alpha, *beta, theta);
            TameSequence::gevrey_log(a, b)
        }
        TameSequence::Tabulated { .. } => Err(CarlemanError::NotGevreyLog),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MthetaNumeric {
    pub sequence: TameSequence,
    /// Indices whose supremum sits on an end of the `τ` grid.
    pub boundary_indices: Vec<usize>,
    pub warnings: Vec<String>,
}

/// Default `τ` grid for [`mtheta_numeric`]: 2048 points in `[1e-10, 1]`.
pub fn default_tau_grid() -> Vec<f64> {
    log_grid(1e-10, 1.0, 2048)
}

/// `M^{(θ)}_j = sup_τ τ^{-j} h_M(θ^{-1}(τ))` over a `τ` grid, in log space.
pub fn mtheta_numeric(m: &TameSequence, theta: &AdmissibleFunction, jmax: usize, tau_grid: &[f64]) -> MthetaNumeric {
    let mut warnings = Vec::new();
    let mut clamped = 0usize;
    let mut truncated = 0usize;
    let samples: Vec<(f64, f64)> = tau_grid
        .iter()
        .map(|&tau| {
            let (t, low) = theta.inverse(tau);
            clamped += low as usize;
            let h = h_full(m, t);
            truncated += h.truncated as usize;
            (tau.ln(), h.ln_value)
        })
        .collect();
    if clamped > 0 {
        warnings.push(format!("{clamped} grid points fell below the inversion bracket"));
    }
    if truncated > 0 {
        warnings.push(format!("{truncated} evaluations of h_M hit the end of the table"));
    }
    let mut log_values = Vec::with_capacity(jmax + 1);
    let mut boundary_indices = Vec::new();
    for j in 0..=jmax {
        let (best, at) = samples
            .iter()
            .enumerate()
            .filter(|(_, (_, lh))| lh.is_finite())
            .map(|(i, (lt, lh))| (-(j as f64) * lt + lh, i))
            .fold((f64::NEG_INFINITY, 0), |acc, x| if x.0 > acc.0 { x } else { acc });
        if j > 0 && (at == 0 || at + 1 == samples.len()) {
            boundary_indices.push(j);
        }
        log_values.push(best);
    }
    if !boundary_indices.is_empty() {
        warnings.push(format!(
            "supremum on the grid boundary for {} indices starting at j={}",
            boundary_indices.len(),
            boundary_indices[0]
        ));
    }
    let sequence = if log_values.iter().all(|v| v.is_finite()) {
        TameSequence::Tabulated { log_values }
    } else {
        warnings.push("h_M vanished on the whole grid".into());
        TameSequence::Tabulated { log_values: vec![0.0] }
    };
    MthetaNumeric { sequence, boundary_indices, warnings }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Equivalence {
    Equivalent,
    Inequivalent,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    /// `r_j = max(M1_j/M2_j, M2_j/M1_j)^{1/j}` for `j = 1..=jmax`.
    pub ratios: Vec<f64>,
    pub sup: f64,
    /// Slope of `ln r_j` against `ln j` over the upper half of the range.
    pub trend: f64,
    pub verdict: Equivalence,
}

/// Growth-trend test for `M1 ≈ M2`: bounded `r_j` means equivalent. The
/// verdict is inequivalent when `ln r_j` grows against `ln j` with slope
/// above `0.2` over `[jmax/2, jmax]`.
pub fn compare_sequences(m1: &TameSequence, m2: &TameSequence, jmax: usize) -> Comparison {
    let n = [m1.max_index(), m2.max_index()].into_iter().flatten().fold(jmax, usize::min);
    let ratios: Vec<f64> = (1..=n)
        .map(|j| {
            let d = (m1.ln_m(j).expect("in range") - m2.ln_m(j).expect("in range")).abs();
            (d / j as f64).exp()
        })
        .collect();
    let sup = ratios.iter().copied().fold(1.0, f64::max);
    let lo = (n / 2).max(1);
    let pts: Vec<(f64, f64)> = (lo..=n).map(|j| ((j as f64).ln(), ratios[j - 1].ln())).collect();
    let trend = fit_slope(&pts).unwrap_or(0.0);
    let verdict = if trend > 0.2 { Equivalence::Inequivalent } else { Equivalence::Equivalent };
    Comparison { ratios, sup, trend, verdict }
}

/// Grid constants `(c, c')`, powers of two in `[2^-10, 2^10]`, with
/// `h_M(ct) ≤ h_{M'}(θ(t)) ≤ h_M(c't)` on the grid: the largest such `c` and
/// the smallest such `c'`.
pub fn sandwich_constants(
    m: &TameSequence,
    m_theta: &TameSequence,
    theta: &AdmissibleFunction,
    grid: &[f64],
) -> Option<(f64, f64)> {
    let mid: Vec<f64> = grid.iter().map(|&t| h_full(m_theta, theta.eval(t)).ln_value).collect();
    let le = |a: f64, b: f64| a <= b + 1e-9 * (1.0 + b.abs());
    let c = (-10..=10)
        .rev()
        .map(|k| 2f64.powi(k))
        .find(|c| grid.iter().zip(&mid).all(|(&t, &x)| le(h_full(m, c * t).ln_value, x)))?;
    let c2 = (-10..=10)
        .map(|k| 2f64.powi(k))
        .find(|c| grid.iter().zip(&mid).all(|(&t, &x)| le(x, h_full(m, c * t).ln_value)))?;
    Some((c, c2))
}

/// Smallest `C = 2^k ≤ 2^10` with `C^{-j} M_j ≤ M'_j ≤ C^j M_j^s` for
/// `j ≤ jmax`.
pub fn growth_bound_constant(m: &TameSequence, m_theta: &TameSequence, s: f64, jmax: usize) -> Option<f64> {
    let n = [m.max_index(), m_theta.max_index()].into_iter().flatten().fold(jmax, usize::min);
    (0..=10).map(|k| 2f64.powi(k)).find(|c| {
        let lc = c.ln();
        (0..=n).all(|j| {
            let a = m.ln_m(j).expect("in range");
            let b = m_theta.ln_m(j).expect("in range");
            let tol = 1e-9 * (1.0 + b.abs());
            -(j as f64) * lc + a <= b + tol && b <= j as f64 * lc + s * a + tol
        })
    })
}
