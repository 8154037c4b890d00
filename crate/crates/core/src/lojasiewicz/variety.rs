use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::optimize::coordinate_descent;
use super::LojaError;
use crate::algebra::{CompiledPoly, ComplexPoint, Polynomial};
use crate::groebner::squarefree_part;

/// One component of a branch parametrization: `re(w) + i·im(w)` where `re`
/// and `im` are rational polynomials evaluated at complex parameters `w`.
#[derive(Clone, Debug)]
pub struct BranchComponent {
    pub re: Polynomial,
    pub im: Polynomial,
}

/// Parametrized piece of a complex zero set, `w ↦ z(w)`.
#[derive(Clone, Debug)]
pub struct Branch {
    components: Vec<BranchComponent>,
    compiled: Vec<(CompiledPoly, CompiledPoly)>,
    nparams: usize,
}

impl Branch {
    pub fn new(components: Vec<BranchComponent>) -> Result<Self, LojaError> {
        let nparams =
            components.first().map(|c| c.re.nvars()).ok_or(LojaError::InvalidBranch("no components".into()))?;
        if components.iter().any(|c| c.re.nvars() != nparams || c.im.nvars() != nparams) {
            return Err(LojaError::InvalidBranch("components use different parameter lists".into()));
        }
        let compiled = components.iter().map(|c| (CompiledPoly::new(&c.re), CompiledPoly::new(&c.im))).collect();
        Ok(Branch { components, compiled, nparams })
    }

    pub fn nparams(&self) -> usize {
        self.nparams
    }

    pub fn components(&self) -> &[BranchComponent] {
        &self.components
    }

    pub fn eval(&self, w: &[Complex64]) -> Vec<Complex64> {
        self.compiled.iter().map(|(re, im)| re.eval(w) + Complex64::i() * im.eval(w)).collect()
    }
}

/// Complex zero set `Z_g`, optionally with parametrized branches.
#[derive(Clone, Debug)]
pub struct VarietyDescriptor {
    g: Polynomial,
    compiled: CompiledPoly,
    branches: Vec<Branch>,
}

impl VarietyDescriptor {
    /// Distances are computed with the squarefree part of `g`, which has the
    /// same zero set and simple components.
    pub fn new(g: Polynomial) -> Self {
        let reduced = if g.is_constant() { None } else { squarefree_part(&g).ok().flatten() };
        let compiled = CompiledPoly::new(reduced.as_ref().unwrap_or(&g));
        VarietyDescriptor { g, compiled, branches: Vec::new() }
    }

    /// Adds branches after checking `|g(z)| ≤ 1e-9 (1 + ‖z‖)^{deg g}` on
    /// sampled parameter values.
    pub fn with_branches(mut self, branches: Vec<Branch>) -> Result<Self, LojaError> {
        let deg = self.g.total_degree() as i32;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (b, branch) in branches.iter().enumerate() {
            if branch.components.len() != self.g.nvars() {
                return Err(LojaError::InvalidBranch(format!("branch {b} has the wrong number of components")));
            }
            for _ in 0..16 {
                let w: Vec<Complex64> = (0..branch.nparams)
                    .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect();
                let z = branch.eval(&w);
                let norm = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                if self.compiled.eval(&z).norm() > 1e-9 * (1.0 + norm).powi(deg) {
                    return Err(LojaError::InvalidBranch(format!("branch {b} leaves the zero set")));
                }
            }
        }
        self.branches = branches;
        Ok(self)
    }

    pub fn g(&self) -> &Polynomial {
        &self.g
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    /// `Z_g = ∅`.
    pub fn is_empty_set(&self) -> bool {
        self.g.is_constant() && !self.g.is_zero()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMethod {
    /// Penalty continuation, Newton projection and tangent polish from
    /// several seeded starts.
    Penalty { starts: usize, seed: u64 },
    /// Grid plus golden-section search over branch parameters.
    Parametrized,
    /// Newton projection of every point of a complex box grid.
    Grid { per_axis: usize },
}

impl Default for DistanceMethod {
    fn default() -> Self {
        DistanceMethod::Penalty { starts: 3, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistanceEstimate {
    /// Upper estimate of `dist(x, Z_g)`; `+∞` when `Z_g` is empty.
    pub distance: f64,
    /// Point of `Z_g` (up to the residual) realizing the estimate.
    pub witness: Option<Vec<(f64, f64)>>,
    /// `false` when the best witness has relative residual above `1e-8`.
    pub converged: bool,
}

impl DistanceEstimate {
    fn exact(distance: f64, z: &[Complex64]) -> Self {
        DistanceEstimate { distance, witness: Some(z.iter().map(|c| (c.re, c.im)).collect()), converged: true }
    }
}

fn dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt()
}

/// Newton step length `|g(z)| / ‖∇g(z)‖`.
fn newton_size(g: &CompiledPoly, z: &[Complex64]) -> f64 {
    let (v, grad) = g.eval_with_gradient(z);
    if v.norm() == 0.0 {
        return 0.0;
    }
    let gn = grad.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if gn == 0.0 {
        f64::INFINITY
    } else {
        v.norm() / gn
    }
}

/// Minimum-norm Newton iteration onto `g = 0`, stopping once the step is
/// below `1e-13·scale`. Linear convergence at multiple components is detected
/// from the step ratio and the step is scaled by the estimated multiplicity.
pub(crate) fn newton_project(g: &CompiledPoly, start: &[Complex64], scale: f64) -> Option<Vec<Complex64>> {
    let mut z = start.to_vec();
    let max_mult = g.degree().max(1) as f64;
    let mut mult = 1.0;
    let mut prev = f64::INFINITY;
    let mut steady = 0;
    for _ in 0..400 {
        let (v, grad) = g.eval_with_gradient(&z);
        if v.norm() == 0.0 {
            return Some(z);
        }
        let gn: f64 = grad.iter().map(|c| c.norm_sqr()).sum();
        if gn == 0.0 || !gn.is_finite() {
            return None;
        }
        let size = v.norm() / gn.sqrt();
        let q = size / prev;
        prev = size;
        if mult > 1.0 && q > 0.9 {
            mult = 1.0;
            steady = 0;
        } else if mult == 1.0 && (0.45..0.98).contains(&q) {
            steady += 1;
            if steady >= 2 {
                mult = (1.0 / (1.0 - q)).round().clamp(1.0, max_mult);
            }
        } else {
            steady = 0;
        }
        let step = mult * v / gn;
        for (zi, c) in z.iter_mut().zip(&grad) {
            *zi -= step * c.conj();
        }
        if !z.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return None;
        }
        if mult * size <= 1e-13 * scale {
            return Some(z);
        }
    }
    (newton_size(g, &z) <= 1e-8 * scale).then_some(z)
}

/// Moves along the complex tangent space towards `x` and re-projects, while
/// the distance decreases.
fn polish(g: &CompiledPoly, x: &[Complex64], mut z: Vec<Complex64>) -> Vec<Complex64> {
    let mut d = dist(&z, x);
    for _ in 0..200 {
        let (_, grad) = g.eval_with_gradient(&z);
        let gn: f64 = grad.iter().map(|c| c.norm_sqr()).sum();
        if gn == 0.0 || !gn.is_finite() || d == 0.0 {
            break;
        }
        let diff: Vec<Complex64> = x.iter().zip(&z).map(|(a, b)| a - b).collect();
        let along: Complex64 = diff.iter().zip(&grad).map(|(a, b)| a * b).sum::<Complex64>() / gn;
        let v: Vec<Complex64> = diff.iter().zip(&grad).map(|(a, b)| a - along * b.conj()).collect();
        let vn = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if vn <= 1e-14 * d {
            break;
        }
        let mut improved = false;
        let mut lambda = 1.0;
        for _ in 0..30 {
            let trial: Vec<Complex64> = z.iter().zip(&v).map(|(a, b)| a + lambda * b).collect();
            if let Some(p) = newton_project(g, &trial, d) {
                let dp = dist(&p, x);
                if dp < d * (1.0 - 1e-13) {
                    z = p;
                    d = dp;
                    improved = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }
    z
}

/// Levenberg-Marquardt on `‖w−x‖²/R² + ρ|g(w)|²/G²` over `w ∈ C^n`, for `ρ`
/// from `1e2` to `1e12`.
fn penalty_descent(g: &CompiledPoly, x: &[Complex64], start: &[Complex64], r: f64, gx: f64) -> Vec<Complex64> {
    let n = x.len();
    let pack = |z: &[Complex64]| DVector::from_iterator(2 * n, z.iter().flat_map(|c| [c.re, c.im]));
    let unpack = |u: &DVector<f64>| (0..n).map(|k| Complex64::new(u[2 * k], u[2 * k + 1])).collect::<Vec<_>>();
    let xu = pack(x);
    let mut u = pack(start);
    for stage in 1..=6 {
        let rho = 10f64.powi(2 * stage);
        let w = rho.sqrt() / gx;
        let residual = |u: &DVector<f64>| -> (DVector<f64>, Vec<Complex64>) {
            let z = unpack(u);
            let (v, grad) = g.eval_with_gradient(&z);
            let mut res = DVector::zeros(2 * n + 2);
            for i in 0..2 * n {
                res[i] = (u[i] - xu[i]) / r;
            }
            res[2 * n] = w * v.re;
            res[2 * n + 1] = w * v.im;
            (res, grad)
        };
        let (mut res, mut grad) = residual(&u);
        let mut cost = res.norm_squared();
        let mut lambda = 1e-3;
        for _ in 0..20 {
            // JᵀJ and Jᵀres from the identity block and the 2×2n block of g
            let mut jtj = DMatrix::from_diagonal_element(2 * n, 2 * n, 1.0 / (r * r));
            let mut rhs = DVector::zeros(2 * n);
            let mut rows = [DVector::zeros(2 * n), DVector::zeros(2 * n)];
            for k in 0..n {
                rows[0][2 * k] = w * grad[k].re;
                rows[0][2 * k + 1] = -w * grad[k].im;
                rows[1][2 * k] = w * grad[k].im;
                rows[1][2 * k + 1] = w * grad[k].re;
            }
            for (row, rv) in rows.iter().zip([res[2 * n], res[2 * n + 1]]) {
                jtj.ger(1.0, row, row, 1.0);
                rhs.axpy(-rv, row, 1.0);
            }
            for i in 0..2 * n {
                rhs[i] -= res[i] / r;
            }
            let mut accepted = false;
            for _ in 0..12 {
                let mut a = jtj.clone();
                for i in 0..2 * n {
                    a[(i, i)] += lambda * jtj[(i, i)].max(1e-300);
                }
                let Some(step) = a.lu().solve(&rhs) else {
                    lambda *= 10.0;
                    continue;
                };
                let trial = &u + &step;
                let (tres, tgrad) = residual(&trial);
                let tcost = tres.norm_squared();
                if tcost.is_finite() && tcost < cost {
                    let small = step.norm() <= 1e-14 * (u.norm() + r) || cost - tcost <= 1e-9 * cost;
                    u = trial;
                    res = tres;
                    grad = tgrad;
                    cost = tcost;
                    lambda = (lambda / 3.0).max(1e-12);
                    accepted = !small;
                    break;
                }
                lambda *= 4.0;
            }
            if !accepted {
                break;
            }
        }
    }
    unpack(&u)
}

fn check_point(x: &ComplexPoint, v: &VarietyDescriptor) -> Result<(), LojaError> {
    if x.dim() != v.g.nvars() {
        return Err(LojaError::DimensionMismatch { expected: v.g.nvars(), got: x.dim() });
    }
    if !x.is_real() {
        return Err(LojaError::NotReal);
    }
    Ok(())
}

/// Upper estimate of `dist(x, Z_g)` for a real point `x`.
pub fn dist_to_variety(
    x: &ComplexPoint,
    v: &VarietyDescriptor,
    method: DistanceMethod,
) -> Result<DistanceEstimate, LojaError> {
    check_point(x, v)?;
    let z0 = x.coords();
    if v.is_empty_set() {
        return Ok(DistanceEstimate { distance: f64::INFINITY, witness: None, converged: true });
    }
    let g = &v.compiled;
    let gx = g.eval(z0).norm();
    if gx == 0.0 {
        return Ok(DistanceEstimate::exact(0.0, z0));
    }
    match method {
        DistanceMethod::Penalty { starts, seed } => Ok(penalty(g, z0, gx, starts, seed)),
        DistanceMethod::Parametrized => parametrized(v, z0),
        DistanceMethod::Grid { per_axis } => Ok(grid(g, z0, per_axis)),
    }
}

fn finish(g: &CompiledPoly, x: &[Complex64], best: Option<Vec<Complex64>>) -> DistanceEstimate {
    match best {
        Some(z) => {
            let converged = newton_size(g, &z) <= 1e-8 * dist(&z, x);
            DistanceEstimate::exact(dist(&z, x), &z).with_converged(converged)
        }
        None => DistanceEstimate { distance: f64::NAN, witness: None, converged: false },
    }
}

impl DistanceEstimate {
    fn with_converged(mut self, converged: bool) -> Self {
        self.converged = converged;
        self
    }
}

fn keep_best(best: &mut Option<(f64, Vec<Complex64>)>, x: &[Complex64], z: Vec<Complex64>) {
    let d = dist(&z, x);
    if d.is_finite() && best.as_ref().is_none_or(|(bd, _)| d < *bd) {
        *best = Some((d, z));
    }
}

fn penalty(g: &CompiledPoly, x: &[Complex64], gx: f64, starts: usize, seed: u64) -> DistanceEstimate {
    let n = x.len();
    let norm_x = x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    let scale = if norm_x > 0.0 { norm_x } else { 1.0 };
    if let Some(p) = newton_project(g, x, scale) {
        keep_best(&mut best, x, polish(g, x, p));
    }
    let r = best.as_ref().map(|(d, _)| *d).filter(|d| *d > 0.0).unwrap_or(if norm_x > 0.0 { norm_x } else { 1.0 });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inits: Vec<Vec<Complex64>> = vec![x.to_vec()];
    for _ in 0..starts {
        let dir: Vec<Complex64> =
            (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let dn = dir.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt().max(1e-300);
        let scale = r * rng.random_range(0.2..2.0) / dn;
        inits.push(x.iter().zip(&dir).map(|(a, d)| a + scale * d).collect());
    }
    for init in inits {
        let w = penalty_descent(g, x, &init, r, gx);
        if let Some(p) = newton_project(g, &w, scale) {
            keep_best(&mut best, x, polish(g, x, p));
        }
    }
    finish(g, x, best.map(|(_, z)| z))
}

fn parametrized(v: &VarietyDescriptor, x: &[Complex64]) -> Result<DistanceEstimate, LojaError> {
    if v.branches.is_empty() {
        return Err(LojaError::NoBranches);
    }
    let norm_x = x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt().max(1e-300);
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    for branch in &v.branches {
        let k = branch.nparams;
        let objective = |u: &[f64]| -> f64 {
            let w: Vec<Complex64> = (0..k).map(|i| Complex64::new(u[2 * i], u[2 * i + 1])).collect();
            dist(&branch.eval(&w), x)
        };
        let per_axis: usize = match k {
            0 => 1,
            1 => 41,
            2 => 11,
            _ => 5,
        };
        let mut seeds: Vec<(f64, Vec<f64>, f64)> = Vec::new();
        for width in [2.0 * norm_x, 2.0 * norm_x.sqrt(), 2.0 * norm_x.cbrt(), 2.0] {
            let spacing = if per_axis > 1 { 2.0 * width / (per_axis - 1) as f64 } else { width };
            let total = per_axis.pow(2 * k as u32);
            let mut local: Vec<(f64, Vec<f64>)> = (0..total)
                .map(|mut idx| {
                    let u: Vec<f64> = (0..2 * k)
                        .map(|_| {
                            let i = idx % per_axis;
                            idx /= per_axis;
                            -width + spacing * i as f64
                        })
                        .collect();
                    (objective(&u), u)
                })
                .collect();
            local.sort_by(|a, b| a.0.total_cmp(&b.0));
            seeds.extend(local.into_iter().take(3).map(|(f, u)| (f, u, spacing)));
        }
        for (_, u, spacing) in seeds {
            let (u, _) = coordinate_descent(objective, &u, spacing, 60);
            let w: Vec<Complex64> = (0..k).map(|i| Complex64::new(u[2 * i], u[2 * i + 1])).collect();
            keep_best(&mut best, x, branch.eval(&w));
        }
    }
    Ok(finish(&v.compiled, x, best.map(|(_, z)| z)))
}

fn grid(g: &CompiledPoly, x: &[Complex64], per_axis: usize) -> DistanceEstimate {
    let n = x.len();
    let per_axis = per_axis.max(2);
    let norm_x = x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let width =
        if g.eval(&vec![Complex64::new(0.0, 0.0); n]).norm() == 0.0 && norm_x > 0.0 { 1.1 * norm_x } else { 1.0 };
    let spacing = 2.0 * width / (per_axis - 1) as f64;
    let total = per_axis.pow(2 * n as u32);
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    for mut idx in 0..total {
        let z: Vec<Complex64> = x
            .iter()
            .map(|c| {
                let a = idx % per_axis;
                idx /= per_axis;
                let b = idx % per_axis;
                idx /= per_axis;
                c + Complex64::new(-width + spacing * a as f64, -width + spacing * b as f64)
            })
            .collect();
        if let Some(p) = newton_project(g, &z, width) {
            keep_best(&mut best, x, p);
        }
    }
    let best = best.map(|(_, z)| polish(g, x, z));
    finish(g, x, best)
}
