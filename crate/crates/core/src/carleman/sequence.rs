use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::CarlemanError;

const LOG_TOL: f64 = 1e-12;

/// Weight sequence `M_0, M_1, …`, stored through `ln M_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum TameSequence {
    /// `M_j = j!^α · (ln(e+j))^{βj}`.
    GevreyLog { alpha: f64, beta: f64 },
    /// Explicit values `ln M_0, …, ln M_jmax`.
    Tabulated { log_values: Vec<f64> },
}

impl TameSequence {
    pub fn gevrey_log(alpha: f64, beta: f64) -> Result<Self, CarlemanError> {
        if !(alpha.is_finite() && beta.is_finite() && alpha >= 0.0 && beta >= 0.0) {
            return Err(CarlemanError::InvalidParameter(format!("alpha={alpha}, beta={beta}")));
        }
        Ok(TameSequence::GevreyLog { alpha, beta })
    }

    pub fn tabulated(values: &[f64]) -> Result<Self, CarlemanError> {
        if values.is_empty() {
            return Err(CarlemanError::EmptyTable);
        }
        if let Some(index) = values.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(CarlemanError::NonPositiveValue { index });
        }
        Ok(TameSequence::Tabulated { log_values: values.iter().map(|v| v.ln()).collect() })
    }

    pub fn from_log_values(log_values: Vec<f64>) -> Result<Self, CarlemanError> {
        if log_values.is_empty() {
            return Err(CarlemanError::EmptyTable);
        }
        if let Some(index) = log_values.iter().position(|v| !v.is_finite()) {
            return Err(CarlemanError::NonPositiveValue { index });
        }
        Ok(TameSequence::Tabulated { log_values })
    }

    /// Largest index with a known value, `None` when unbounded.
    pub fn max_index(&self) -> Option<usize> {
        match self {
            TameSequence::GevreyLog { .. } => None,
            TameSequence::Tabulated { log_values } => Some(log_values.len() - 1),
        }
    }

    /// `ln M_j`, or `None` outside a tabulated range.
    pub fn ln_m(&self, j: usize) -> Option<f64> {
        match self {
            TameSequence::GevreyLog { alpha, beta } => Some(gevrey_ln(*alpha, *beta, j as f64)),
            TameSequence::Tabulated { log_values } => log_values.get(j).copied(),
        }
    }

    pub fn m(&self, j: usize) -> Option<f64> {
        self.ln_m(j).map(f64::exp)
    }

    fn range(&self, jmax: usize) -> usize {
        self.max_index().map_or(jmax, |m| m.min(jmax))
    }
}

pub(crate) fn gevrey_ln(alpha: f64, beta: f64, j: f64) -> f64 {
    let mut v = 0.0;
    if alpha != 0.0 {
        v += alpha * ln_gamma(j + 1.0);
    }
    if beta != 0.0 {
        v += beta * j * (std::f64::consts::E + j).ln().ln();
    }
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TameViolation {
    /// `M_0 ≠ 1`.
    FirstTerm,
    /// `M_{j+1} < M_j`.
    NotIncreasing { j: usize },
    /// `M_{j+1}/M_j < M_j/M_{j-1}`.
    NotLogConvex { j: usize },
    /// `M_j M_k > M_{j+k}`.
    NotSuperMultiplicative { j: usize, k: usize },
    /// No `A = 2^k`, `k ≤ 20`, bounds `M_{j+k}` on the range.
    NoModerateGrowth,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TameReport {
    pub ok: bool,
    pub checked_up_to: usize,
    /// Smallest `A = 2^k` with `M_{j+k} ≤ A^{j+k} M_j M_k` on the range.
    pub moderate_growth: Option<f64>,
    pub first_violation: Option<TameViolation>,
}

/// Checks `M_0 = 1`, monotonicity, logarithmic convexity, `M_j M_k ≤ M_{j+k}`
/// and moderate growth for `j + k ≤ jmax`. Comparisons are non-strict with a
/// tolerance of `1e-12` in log scale.
pub fn check_tame(m: &TameSequence, jmax: usize) -> TameReport {
    let n = m.range(jmax.max(2));
    let l: Vec<f64> = (0..=n).map(|j| m.ln_m(j).expect("in range")).collect();
    let mut first_violation = None;
    if l[0].abs() > LOG_TOL {
        first_violation = Some(TameViolation::FirstTerm);
    }
    if first_violation.is_none() {
        first_violation = (0..n).find(|&j| l[j + 1] < l[j] - LOG_TOL).map(|j| TameViolation::NotIncreasing { j });
    }
    if first_violation.is_none() {
        first_violation =
            (1..n).find(|&j| l[j + 1] - l[j] < l[j] - l[j - 1] - LOG_TOL).map(|j| TameViolation::NotLogConvex { j });
    }
    if first_violation.is_none() {
        'outer: for j in 1..=n {
            for k in 1..=n - j {
                if l[j] + l[k] > l[j + k] + LOG_TOL {
                    first_violation = Some(TameViolation::NotSuperMultiplicative { j, k });
                    break 'outer;
                }
            }
        }
    }
    let moderate_growth = (0..=20).map(|k| 2f64.powi(k)).find(|a| {
        let la = a.ln();
        (0..=n).all(|j| (0..=n - j).all(|k| l[j + k] <= (j + k) as f64 * la + l[j] + l[k] + LOG_TOL))
    });
    if first_violation.is_none() && moderate_growth.is_none() {
        first_violation = Some(TameViolation::NoModerateGrowth);
    }
    TameReport { ok: first_violation.is_none(), checked_up_to: n, moderate_growth, first_violation }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NonQaVerdict {
    NonQuasianalytic,
    Quasianalytic,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonQaReport {
    pub verdict: NonQaVerdict,
    /// `true` when the verdict rests on finite data only.
    pub heuristic: bool,
    /// Partial sums of `M_j / ((j+1) M_{j+1})` for `j = 0..jmax-1`.
    pub partial_sums: Vec<f64>,
}

/// Non-quasianalyticity test `Σ M_j/((j+1)M_{j+1}) < ∞`.
///
/// The Gevrey-log family uses the exact rule (non-quasianalytic iff `α > 0`,
/// or `α = 0` and `β > 1`). Tabulated data get a tail-slope heuristic: the
/// series is declared convergent when its terms decay faster than `j^{-1.05}`.
pub fn check_nonqa(m: &TameSequence, jmax: usize) -> NonQaReport {
    let n = m.range(jmax.max(10));
    let terms: Vec<f64> = (0..n)
        .map(|j| (m.ln_m(j).expect("in range") - m.ln_m(j + 1).expect("in range") - ((j + 1) as f64).ln()).exp())
        .collect();
    let partial_sums: Vec<f64> = terms
        .iter()
        .scan(0.0, |acc, t| {
            *acc += t;
            Some(*acc)
        })
        .collect();
    match m {
        TameSequence::GevreyLog { alpha, beta } => {
            let nonqa = *alpha > 0.0 || *beta > 1.0;
            NonQaReport {
                verdict: if nonqa { NonQaVerdict::NonQuasianalytic } else { NonQaVerdict::Quasianalytic },
                heuristic: false,
                partial_sums,
            }
        }
        TameSequence::Tabulated { .. } => {
            let lo = (n / 2).max(1);
            let pts: Vec<(f64, f64)> =
                (lo..n).filter(|&j| terms[j] > 0.0).map(|j| ((j as f64).ln(), terms[j].ln())).collect();
            let slope = fit_slope(&pts);
            let nonqa = slope.is_some_and(|s| s < -1.05);
            NonQaReport {
                verdict: if nonqa { NonQaVerdict::NonQuasianalytic } else { NonQaVerdict::Quasianalytic },
                heuristic: true,
                partial_sums,
            }
        }
    }
}

pub(crate) fn fit_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Value of `h_M(t) = inf_j t^j M_j`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HValue {
    /// `ln h_M(t)`; `-∞` when the infimum is zero.
    pub ln_value: f64,
    /// Minimizing index (the last index tried when the infimum is zero).
    pub argmin: u64,
    /// Whether the minimum sits on the largest index examined.
    pub truncated: bool,
}

impl HValue {
    pub fn value(&self) -> f64 {
        self.ln_value.exp()
    }
}

/// `min_{0 ≤ j ≤ jmax} t^j M_j` in log space.
pub fn h_eval(m: &TameSequence, t: f64, jmax: usize) -> HValue {
    assert!(t > 0.0, "h_M needs t > 0");
    if t >= 1.0 {
        return HValue { ln_value: 0.0, argmin: 0, truncated: false };
    }
    let lt = t.ln();
    let n = m.range(jmax);
    let mut best = (0.0, 0usize);
    for j in 1..=n {
        let v = j as f64 * lt + m.ln_m(j).expect("in range");
        if v < best.0 {
            best = (v, j);
        }
    }
    HValue { ln_value: best.0, argmin: best.1 as u64, truncated: best.1 == n && n > 0 }
}

/// Exact `h_M(t)` for the Gevrey-log family, without an index cap.
///
/// The ratio `M_{j+1}/M_j` is non-decreasing, so the minimizer is the first
/// `j` with `t·M_{j+1}/M_j ≥ 1`, found by doubling and bisection.
pub fn h_gevrey_exact(alpha: f64, beta: f64, t: f64) -> HValue {
    assert!(t > 0.0, "h_M needs t > 0");
    if t >= 1.0 {
        return HValue { ln_value: 0.0, argmin: 0, truncated: false };
    }
    let lt = t.ln();
    let stops = |j: u64| lt + gevrey_ln(alpha, beta, (j + 1) as f64) - gevrey_ln(alpha, beta, j as f64) >= 0.0;
    if stops(0) {
        return HValue { ln_value: 0.0, argmin: 0, truncated: false };
    }
    const LIMIT: u64 = 1 << 52;
    let mut hi: u64 = 1;
    while !stops(hi) {
        if hi >= LIMIT {
            return HValue { ln_value: f64::NEG_INFINITY, argmin: hi, truncated: true };
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    while hi > lo + 1 {
        let mid = lo + (hi - lo) / 2;
        if stops(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let j = hi;
    HValue { ln_value: j as f64 * lt + gevrey_ln(alpha, beta, j as f64), argmin: j, truncated: false }
}

/// `h_M(t)` using the exact routine for the Gevrey-log family and the full
/// table otherwise.
pub fn h_full(m: &TameSequence, t: f64) -> HValue {
    match m {
        TameSequence::GevreyLog { alpha, beta } => h_gevrey_exact(*alpha, *beta, t),
        TameSequence::Tabulated { log_values } => h_eval(m, t, log_values.len() - 1),
    }
}

/// `n` logarithmically spaced points in `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Default `t`-grid: 512 points in `[1e-8, 1]`.
pub fn default_grid() -> Vec<f64> {
    log_grid(1e-8, 1.0, 512)
}

/// Smallest `B = 2^k`, `k ≤ 20`, with `h_M(t) ≤ h_M(Bt)^2` on the grid.
pub fn find_hsq_constant(m: &TameSequence, grid: &[f64]) -> Option<f64> {
    let base: Vec<f64> = grid.iter().map(|&t| h_full(m, t).ln_value).collect();
    (0..=20).map(|k| 2f64.powi(k)).find(|b| {
        grid.iter().zip(&base).all(|(&t, &lh)| {
            let rhs = 2.0 * h_full(m, b * t).ln_value;
            lh <= rhs + LOG_TOL * (1.0 + rhs.abs()) || (lh == f64::NEG_INFINITY)
        })
    })
}
