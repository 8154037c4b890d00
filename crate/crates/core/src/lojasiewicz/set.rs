use serde::{Deserialize, Serialize};

use super::optimize::golden_section;
use super::LojaError;

/// Arc component `± coef · t^power · ln(1 + 1/t)^log_power`, `t > 0`; the
/// sign is enumerated when `signed` is set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcComponent {
    pub coef: f64,
    pub power: f64,
    #[serde(default)]
    pub log_power: f64,
    #[serde(default)]
    pub signed: bool,
}

impl ArcComponent {
    pub fn eval(&self, t: f64) -> f64 {
        if self.coef == 0.0 {
            return 0.0;
        }
        let mut v = self.coef * t.powf(self.power);
        if self.log_power != 0.0 {
            v *= (1.0 / t).ln_1p().powf(self.log_power);
        }
        v
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetPiece {
    Origin,
    /// Coordinate subspace on which the listed (0-based) coordinates vanish.
    Subspace {
        vanishing: Vec<usize>,
    },
    Arc {
        components: Vec<ArcComponent>,
    },
}

/// Union of pieces, each containing the origin in its closure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetDescriptor {
    pub pieces: Vec<SetPiece>,
}

impl SetDescriptor {
    pub fn new(pieces: Vec<SetPiece>, dim: usize) -> Result<Self, LojaError> {
        if pieces.is_empty() {
            return Err(LojaError::InvalidSet("no pieces".into()));
        }
        for p in &pieces {
            match p {
                SetPiece::Origin => {}
                SetPiece::Subspace { vanishing } => {
                    if vanishing.iter().any(|&i| i >= dim) {
                        return Err(LojaError::InvalidSet("subspace index out of range".into()));
                    }
                }
                SetPiece::Arc { components } => {
                    if components.len() != dim {
                        return Err(LojaError::InvalidSet("arc has the wrong number of components".into()));
                    }
                    if components.iter().any(|c| c.coef != 0.0 && c.power <= 0.0) {
                        return Err(LojaError::InvalidSet("arc components must vanish as t → 0".into()));
                    }
                    if components.iter().all(|c| c.coef == 0.0) {
                        return Err(LojaError::InvalidSet("arc is constant".into()));
                    }
                }
            }
        }
        Ok(SetDescriptor { pieces })
    }

    pub fn origin() -> Self {
        SetDescriptor { pieces: vec![SetPiece::Origin] }
    }

    /// `{|x_1| = |x_2|^μ}` in the plane.
    pub fn power_curve(mu: f64) -> Self {
        SetDescriptor {
            pieces: vec![SetPiece::Arc {
                components: vec![
                    ArcComponent { coef: 1.0, power: mu, log_power: 0.0, signed: true },
                    ArcComponent { coef: 1.0, power: 1.0, log_power: 0.0, signed: true },
                ],
            }],
        }
    }

    /// Point of an arc piece at parameter `t` with the given signs.
    pub fn arc_point(components: &[ArcComponent], t: f64, signs: &[f64]) -> Vec<f64> {
        components.iter().zip(signs).map(|(c, s)| s * c.eval(t)).collect()
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
}

/// Sign vectors for the signed components (`2^k` of them).
fn sign_branches(components: &[ArcComponent]) -> Vec<Vec<f64>> {
    let signed: Vec<usize> = (0..components.len()).filter(|&i| components[i].signed).collect();
    (0..1usize << signed.len())
        .map(|mask| {
            let mut s = vec![1.0; components.len()];
            for (b, &i) in signed.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    s[i] = -1.0;
                }
            }
            s
        })
        .collect()
}

fn dist_to_arc(x: &[f64], components: &[ArcComponent]) -> f64 {
    let nx = norm(x);
    let mut best = nx;
    if nx == 0.0 {
        return 0.0;
    }
    let unsigned = vec![1.0; components.len()];
    let size = |t: f64| norm(&SetDescriptor::arc_point(components, t, &unsigned));
    // largest t with ‖γ(t)‖ ≤ 2‖x‖, assuming ‖γ‖ grows with t near 0
    let (mut lo, mut hi) = (f64::MIN_POSITIVE.ln(), 0.0f64);
    while size(hi.exp()) <= 2.0 * nx && hi < 700.0 {
        lo = hi;
        hi += 1.0 + hi.abs();
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if size(mid.exp()) <= 2.0 * nx {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    let t_hi = hi.exp();
    let mut ts: Vec<f64> = (0..=200).map(|i| t_hi * i as f64 / 200.0).filter(|t| *t > 0.0).collect();
    ts.extend((0..200).map(|i| t_hi * (1e-12f64).powf(i as f64 / 199.0)));
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    for signs in sign_branches(components) {
        let f = |t: f64| if t <= 0.0 { nx } else { dist(x, &SetDescriptor::arc_point(components, t, &signs)) };
        let vals: Vec<f64> = ts.iter().map(|&t| f(t)).collect();
        let mut order: Vec<usize> = (0..ts.len()).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        for &i in order.iter().take(4) {
            let a = if i == 0 { 0.0 } else { ts[i - 1] };
            let b = if i + 1 == ts.len() { ts[i] } else { ts[i + 1] };
            let (_, fv) = golden_section(f, a, b, 1e-15, 200);
            best = best.min(fv).min(vals[i]);
        }
    }
    best
}

/// `dist(x, Y)`: closed form on the origin and on subspaces, grid plus
/// golden-section search on every sign branch of an arc.
pub fn dist_to_set(x: &[f64], y: &SetDescriptor) -> f64 {
    y.pieces
        .iter()
        .map(|p| match p {
            SetPiece::Origin => norm(x),
            SetPiece::Subspace { vanishing } => vanishing.iter().map(|&i| x[i] * x[i]).sum::<f64>().sqrt(),
            SetPiece::Arc { components } => dist_to_arc(x, components),
        })
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_and_subspace() {
        assert_eq!(dist_to_set(&[3.0, 4.0], &SetDescriptor::origin()), 5.0);
        let axis = SetDescriptor::new(vec![SetPiece::Subspace { vanishing: vec![0] }], 2).unwrap();
        assert_eq!(dist_to_set(&[0.3, 4.0], &axis), 0.3);
        assert!(SetDescriptor::new(vec![SetPiece::Subspace { vanishing: vec![2] }], 2).is_err());
    }

    #[test]
    fn points_on_the_arc_have_zero_distance() {
        for mu in [0.5, 1.5, 3.0] {
            let y = SetDescriptor::power_curve(mu);
            for (t, sx, sy) in [(0.01, 1.0, -1.0), (0.2, -1.0, 1.0), (1e-4, -1.0, -1.0)] {
                let x = [sx * f64::powf(t, mu), sy * t];
                assert!(dist_to_set(&x, &y) < 1e-10, "mu={mu} t={t}");
            }
        }
    }

    #[test]
    fn axis_points_are_close_but_not_on_the_curve() {
        let y = SetDescriptor::power_curve(1.5);
        let t: f64 = 0.01;
        let d = dist_to_set(&[0.0, t], &y);
        assert!(d > 0.0 && d <= t);
        // the nearest point sits at horizontal offset about t^1.5
        assert!((d / t.powf(1.5) - 1.0).abs() < 0.05);
        let brute = (1..200000)
            .map(|i| {
                let s = i as f64 * 2e-7;
                ((s.powf(1.5)).powi(2) + (t - s).powi(2)).sqrt()
            })
            .fold(f64::INFINITY, f64::min);
        assert!((d - brute).abs() <= 1e-9);
    }

    #[test]
    fn logarithmic_arcs() {
        let arc = SetPiece::Arc {
            components: vec![
                ArcComponent { coef: 1.0, power: 2.0, log_power: 1.0, signed: true },
                ArcComponent { coef: 1.0, power: 1.0, log_power: 0.0, signed: true },
            ],
        };
        let y = SetDescriptor::new(vec![arc], 2).unwrap();
        let t: f64 = 0.05;
        let x = [-(t * t) * (1.0 / t).ln_1p(), t];
        assert!(dist_to_set(&x, &y) < 1e-10);
    }
}
