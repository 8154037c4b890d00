use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr_free::gaussian;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::set::{dist_to_set, SetDescriptor};
use super::variety::{dist_to_variety, DistanceMethod, VarietyDescriptor};
use super::LojaError;
use crate::algebra::ComplexPoint;
use crate::carleman::AdmissibleFunction;

/// Sampling plan: points `r·u` for every radius `r` and unit direction `u`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub radii: Vec<f64>,
    pub directions: usize,
    pub seed: u64,
    #[serde(default)]
    pub fit_log: bool,
    /// Range of `dist(x, Y)` used by the regression; defaults to
    /// `[r_min, √(r_min·r_max)]` over the plan radii.
    #[serde(default)]
    pub fit_window: Option<(f64, f64)>,
    #[serde(skip, default)]
    pub method: DistanceMethod,
}

impl Default for SamplePlan {
    /// Radii `2^{-4}` down to `2^{-18}` in steps of `2^{-1/4}`, 64 directions
    /// plus the coordinate axes, seed 42.
    fn default() -> Self {
        SamplePlan {
            radii: geometric_radii(-4.0, -18.0, 4),
            directions: 64,
            seed: 42,
            fit_log: false,
            fit_window: None,
            method: DistanceMethod::default(),
        }
    }
}

/// `2^e` for `e` from `from` down to `to` in steps of `1/per_octave`.
pub fn geometric_radii(from: f64, to: f64, per_octave: usize) -> Vec<f64> {
    let steps = ((from - to) * per_octave as f64).round() as usize;
    (0..=steps).map(|i| 2f64.powf(from - i as f64 / per_octave as f64)).collect()
}

impl SamplePlan {
    pub fn window(&self) -> (f64, f64) {
        self.fit_window.unwrap_or_else(|| {
            let lo = self.radii.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = self.radii.iter().copied().fold(0.0, f64::max);
            (lo, (lo * hi).sqrt())
        })
    }

    /// A plan with interleaved radii and a different direction set, for
    /// checking a fitted bound on points not used by the fit.
    pub fn fresh(&self) -> SamplePlan {
        let radii = self.radii.windows(2).map(|w| (w[0] * w[1]).sqrt()).collect();
        SamplePlan { radii, directions: self.directions + 7, seed: self.seed.wrapping_add(1), ..self.clone() }
    }
}

/// Unit directions: a seeded low-discrepancy set plus `±e_i`.
pub fn directions(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let offset = {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rand::Rng::random_range(&mut rng, 0.0..1.0)
    };
    let mut out: Vec<Vec<f64>> = match dim {
        1 => Vec::new(),
        2 => (0..count)
            .map(|k| {
                let a = 2.0 * PI * (k as f64 + offset) / count as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        3 => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let a = golden * k as f64 + 2.0 * PI * offset;
                    vec![r * a.cos(), r * a.sin(), z]
                })
                .collect()
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| {
                    let v: Vec<f64> = (0..dim).map(|_| gaussian(&mut rng)).collect();
                    let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                    v.into_iter().map(|a| a / n).collect()
                })
                .collect()
        }
    };
    for i in 0..dim {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; dim];
            e[i] = s;
            out.push(e);
        }
    }
    out
}

/// Sample `(r, d)` with `r = dist(x, Y)` and `d = dist(x, Z_g)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub r: f64,
    pub d: f64,
    pub is_envelope: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentFit {
    pub s_hat: f64,
    pub c_hat: f64,
    pub nu_hat: Option<f64>,
    /// Root mean square residual of the envelope regression (natural log).
    pub residual: f64,
    /// Bins used by the regression.
    pub bins: usize,
    /// Bins dropped as lying above the envelope.
    pub trimmed: usize,
    pub samples: Vec<Sample>,
    /// Samples whose distance estimate did not converge.
    pub unconverged: usize,
}

impl ExponentFit {
    pub fn envelope(&self) -> impl Iterator<Item = &Sample> {
        self.samples.iter().filter(|s| s.is_envelope)
    }

    /// `min d / r^s` over the samples.
    pub fn min_ratio(&self, s: f64) -> f64 {
        self.samples.iter().map(|p| p.d / p.r.powf(s)).fold(f64::INFINITY, f64::min)
    }

    /// CSV with columns `log_r,log_d,is_envelope` (base-10 logarithms).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("log_r,log_d,is_envelope\n");
        for s in &self.samples {
            out.push_str(&format!("{:.12},{:.12},{}\n", s.r.log10(), s.d.log10(), s.is_envelope));
        }
        out
    }
}

/// Natural-log excess over the fitted line beyond which a bin minimum is
/// dropped from the envelope.
pub const TRIM_EXCESS: f64 = 0.5;

/// Evaluates `(dist_Y, dist_Z)` at every plan point, in plan order.
pub fn sample_distances(
    v: &VarietyDescriptor,
    y: &SetDescriptor,
    plan: &SamplePlan,
) -> Result<Vec<(f64, f64, bool)>, LojaError> {
    if plan.radii.iter().any(|r| !(*r > 0.0 && *r <= 0.5)) {
        return Err(LojaError::InvalidPlan("radii must lie in (0, 0.5]".into()));
    }
    let dim = v.g().nvars();
    let dirs = directions(dim, plan.directions, plan.seed);
    let points: Vec<(usize, Vec<f64>)> = plan
        .radii
        .iter()
        .flat_map(|&r| dirs.iter().map(move |u| u.iter().map(|a| r * a).collect::<Vec<f64>>()))
        .enumerate()
        .collect();
    points
        .into_par_iter()
        .map(|(i, x)| {
            let ry = dist_to_set(&x, y);
            let method = match plan.method {
                DistanceMethod::Penalty { starts, seed } => {
                    DistanceMethod::Penalty { starts, seed: seed ^ plan.seed.rotate_left(17) ^ i as u64 }
                }
                m => m,
            };
            let est = dist_to_variety(&ComplexPoint::real(&x)?, v, method)?;
            Ok((ry, est.distance, est.converged))
        })
        .collect()
}

/// Least squares `y ≈ X b` via normal equations.
fn least_squares(rows: &[Vec<f64>], y: &[f64]) -> Option<Vec<f64>> {
    let k = rows[0].len();
    let x = nalgebra::DMatrix::from_fn(rows.len(), k, |i, j| rows[i][j]);
    let yv = nalgebra::DVector::from_column_slice(y);
    let xt = x.transpose();
    let sol = (&xt * &x).lu().solve(&(&xt * yv))?;
    Some(sol.iter().copied().collect())
}

/// Fits `dist(x, Z_g) ≈ c · dist(x, Y)^s` to the lower envelope of the
/// samples: minimum `d` per bin of `log10 r` (10 bins per decade), then a
/// least-squares line in log-log scale. Bins more than [`TRIM_EXCESS`] above
/// the line are dropped one at a time and the line refitted, keeping at
/// least half of the bins. With `plan.fit_log` the model is
/// `c · r^s · ln(1+1/r)^{-ν}`.
pub fn fit_separation(v: &VarietyDescriptor, y: &SetDescriptor, plan: &SamplePlan) -> Result<ExponentFit, LojaError> {
    let raw = sample_distances(v, y, plan)?;
    let unconverged = raw.iter().filter(|s| !s.2).count();
    let pairs: Vec<(f64, f64)> = raw.into_iter().map(|(r, d, _)| (r, d)).collect();
    fit_pairs(&pairs, plan.fit_log, Some(plan.window()), unconverged)
}

/// Envelope regression on given `(r, d)` pairs with `r` inside `window`;
/// pairs with non-positive or non-finite entries are dropped.
pub fn fit_pairs(
    pairs: &[(f64, f64)],
    fit_log: bool,
    window: Option<(f64, f64)>,
    unconverged: usize,
) -> Result<ExponentFit, LojaError> {
    let (lo, hi) = window.unwrap_or((0.0, f64::INFINITY));
    let mut samples: Vec<Sample> = pairs
        .iter()
        .filter(|(r, d)| r.is_finite() && d.is_finite() && *r > 0.0 && *d > 0.0)
        .map(|&(r, d)| Sample { r, d, is_envelope: false })
        .collect();
    let mut bins: BTreeMap<i64, usize> = BTreeMap::new();
    for (i, s) in samples.iter().enumerate() {
        if s.r < lo || s.r > hi {
            continue;
        }
        let key = (10.0 * s.r.log10()).floor() as i64;
        let e = bins.entry(key).or_insert(i);
        if s.d < samples[*e].d {
            *e = i;
        }
    }
    let need = if fit_log { 6 } else { 5 };
    if bins.len() < need {
        return Err(LojaError::InsufficientData { bins: bins.len(), needed: need });
    }
    let mut kept: Vec<usize> = bins.values().copied().collect();
    let floor = need.max(kept.len().div_ceil(2));
    let row = |s: &Sample| {
        let mut row = vec![1.0, s.r.ln()];
        if fit_log {
            row.push((1.0 / s.r).ln_1p().ln());
        }
        row
    };
    let insufficient = LojaError::InsufficientData { bins: kept.len(), needed: need };
    let (b, resid) = loop {
        let rows: Vec<Vec<f64>> = kept.iter().map(|&i| row(&samples[i])).collect();
        let y: Vec<f64> = kept.iter().map(|&i| samples[i].d.ln()).collect();
        let b = least_squares(&rows, &y).ok_or(insufficient.clone())?;
        let resid: Vec<f64> =
            rows.iter().zip(&y).map(|(row, yi)| yi - row.iter().zip(&b).map(|(a, c)| a * c).sum::<f64>()).collect();
        // bins that missed the extremal direction sit above the envelope
        let (worst, excess) =
            resid.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (k, e)| if *e > acc.1 { (k, *e) } else { acc });
        if excess > TRIM_EXCESS && kept.len() > floor {
            kept.remove(worst);
            continue;
        }
        break (b, resid);
    };
    for &i in &kept {
        samples[i].is_envelope = true;
    }
    let rms = (resid.iter().map(|e| e * e).sum::<f64>() / resid.len() as f64).sqrt();
    Ok(ExponentFit {
        s_hat: b[1],
        c_hat: b[0].exp(),
        nu_hat: fit_log.then(|| -b[2]),
        residual: rms,
        bins: kept.len(),
        trimmed: bins.len() - kept.len(),
        samples,
        unconverged,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub ok: bool,
    /// `min (ln dist_Z − ln θ(dist_Y))` over the samples.
    pub worst_margin: f64,
    /// Point realizing the worst margin.
    pub worst_point: Vec<f64>,
    pub violations: usize,
    pub checked: usize,
}

/// Checks `dist(x, Z_g) ≥ θ(dist(x, Y))` at every point of `plan`. Points on
/// `Y` are skipped, as are points with `Z_g` empty (no constraint).
pub fn verify_separation(
    v: &VarietyDescriptor,
    y: &SetDescriptor,
    theta: &AdmissibleFunction,
    plan: &SamplePlan,
) -> Result<VerificationReport, LojaError> {
    let raw = sample_distances(v, y, plan)?;
    let dim = v.g().nvars();
    let dirs = directions(dim, plan.directions, plan.seed);
    let mut worst = f64::INFINITY;
    let mut worst_point = Vec::new();
    let mut violations = 0;
    let mut checked = 0;
    for (i, (r, d, _)) in raw.iter().enumerate() {
        if *r <= 0.0 || d.is_infinite() {
            continue;
        }
        checked += 1;
        let margin = d.ln() - theta.ln_eval(*r);
        if margin < 0.0 {
            violations += 1;
        }
        if margin < worst {
            worst = margin;
            let rad = plan.radii[i / dirs.len()];
            worst_point = dirs[i % dirs.len()].iter().map(|a| rad * a).collect();
        }
    }
    Ok(VerificationReport { ok: violations == 0, worst_margin: worst, worst_point, violations, checked })
}

mod rand_distr_free {
    use rand::Rng;

    /// Standard normal draw by the Box-Muller transform.
    pub fn gaussian<R: Rng>(rng: &mut R) -> f64 {
        let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.random_range(0.0..1.0);
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_power_laws_are_recovered() {
        for s in [1.0, 1.5, 2.0] {
            let pairs: Vec<(f64, f64)> = geometric_radii(-2.0, -20.0, 4).into_iter().map(|r| (r, r.powf(s))).collect();
            let fit = fit_pairs(&pairs, false, None, 0).unwrap();
            assert!((fit.s_hat - s).abs() < 1e-6, "{s}: {}", fit.s_hat);
            assert!((fit.c_hat - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn log_corrected_synthetic_data() {
        let pairs: Vec<(f64, f64)> = geometric_radii(-2.0, -30.0, 4)
            .into_iter()
            .map(|r| (r, 0.5 * r.powf(1.5) * (1.0 / r).ln_1p().powf(-0.8)))
            .collect();
        let fit = fit_pairs(&pairs, true, None, 0).unwrap();
        assert!((fit.s_hat - 1.5).abs() < 1e-6);
        assert!((fit.nu_hat.unwrap() - 0.8).abs() < 1e-6);
    }

    #[test]
    fn too_few_bins() {
        let pairs = vec![(0.1, 0.01), (0.05, 0.002), (0.0, 1.0)];
        assert!(matches!(fit_pairs(&pairs, false, None, 0), Err(LojaError::InsufficientData { .. })));
    }

    #[test]
    fn directions_include_axes_and_are_unit() {
        for dim in [2, 3, 4] {
            let d = directions(dim, 16, 42);
            assert_eq!(d.len(), 16 + 2 * dim);
            for u in &d {
                assert!((u.iter().map(|a| a * a).sum::<f64>() - 1.0).abs() < 1e-12);
            }
            assert_eq!(d, directions(dim, 16, 42));
        }
    }

    #[test]
    fn default_plan_spans_four_decades() {
        let p = SamplePlan::default();
        assert_eq!(p.radii[0], 2f64.powi(-4));
        assert!((p.radii.last().unwrap() / 2f64.powi(-18) - 1.0).abs() < 1e-12);
        assert_eq!(p.directions, 64);
        assert_eq!(p.seed, 42);
        let f = p.fresh();
        assert_eq!(f.radii.len(), p.radii.len() - 1);
    }
}
