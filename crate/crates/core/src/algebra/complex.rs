use num_complex::Complex64;

use super::{AlgebraError, Polynomial};

/// Point of `C^n` with finite coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexPoint(Vec<Complex64>);

impl ComplexPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self, AlgebraError> {
        if coords.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(AlgebraError::NonFinitePoint);
        }
        Ok(ComplexPoint(coords))
    }

    pub fn real(coords: &[f64]) -> Result<Self, AlgebraError> {
        Self::new(coords.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_real(&self) -> bool {
        self.0.iter().all(|z| z.im == 0.0)
    }

    pub fn distance(&self, other: &ComplexPoint) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Polynomial with double-precision coefficients, prepared for repeated
/// complex evaluation of the value and the holomorphic gradient.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    nvars: usize,
    max_exp: Vec<u32>,
    terms: Vec<(f64, Vec<u32>)>,
    gradient: Vec<Vec<(f64, Vec<u32>)>>,
}

impl CompiledPoly {
    pub fn new(p: &Polynomial) -> Self {
        let nvars = p.nvars();
        let terms = p.float_terms();
        let mut max_exp = vec![0u32; nvars];
        for (_, e) in &terms {
            for (m, &x) in max_exp.iter_mut().zip(e) {
                *m = (*m).max(x);
            }
        }
        let gradient = p.gradient().iter().map(Polynomial::float_terms).collect();
        CompiledPoly { nvars, max_exp, terms, gradient }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    fn powers(&self, z: &[Complex64]) -> Vec<Vec<Complex64>> {
        z.iter()
            .zip(&self.max_exp)
            .map(|(&zi, &m)| {
                let mut v = Vec::with_capacity(m as usize + 1);
                let mut acc = Complex64::new(1.0, 0.0);
                v.push(acc);
                for _ in 0..m {
                    acc *= zi;
                    v.push(acc);
                }
                v
            })
            .collect()
    }

    fn sum(terms: &[(f64, Vec<u32>)], pw: &[Vec<Complex64>]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, e) in terms {
            let mut t = Complex64::new(*c, 0.0);
            for (p, &k) in pw.iter().zip(e) {
                if k > 0 {
                    t *= p[k as usize];
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        assert_eq!(z.len(), self.nvars);
        Self::sum(&self.terms, &self.powers(z))
    }

    /// Value and holomorphic partial derivatives `∂g/∂z_k`.
    pub fn eval_with_gradient(&self, z: &[Complex64]) -> (Complex64, Vec<Complex64>) {
        assert_eq!(z.len(), self.nvars);
        let pw = self.powers(z);
        let v = Self::sum(&self.terms, &pw);
        let g = self.gradient.iter().map(|t| Self::sum(t, &pw)).collect();
        (v, g)
    }

    /// `Σ |c_α|·|z^α|`, the natural scale for the value at `z`.
    pub fn magnitude(&self, z: &[Complex64]) -> f64 {
        let pw = self.powers(z);
        self.terms
            .iter()
            .map(|(c, e)| {
                c.abs()
                    * pw.iter().zip(e).map(|(p, &k)| if k > 0 { p[k as usize].norm() } else { 1.0 }).product::<f64>()
            })
            .sum()
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(_, e)| e.iter().sum::<u32>()).max().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(_, e)| e.iter().all(|&k| k == 0))
    }
}

/// Evaluates `p` at a complex point; coefficients are rounded to doubles.
/// Overflow surfaces as infinite components rather than an error.
pub fn evaluate(p: &Polynomial, z: &ComplexPoint) -> Result<Complex64, AlgebraError> {
    if z.dim() != p.nvars() {
        return Err(AlgebraError::DimensionMismatch { expected: p.nvars(), got: z.dim() });
    }
    Ok(CompiledPoly::new(p).eval(z.coords()))
}
