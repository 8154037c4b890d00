//! Fitting ideals of the cokernel of `λ`, the matrix whose columns are lifts
//! of the components of `φ` through `σ(v) = Σ v_i ψ_i` followed by the
//! relations among the `ψ_i`.

use rayon::prelude::*;

use crate::algebra::{combinations, same_vars, AlgebraError, PolyMatrix, Polynomial, VarList};
use crate::groebner::{ideal_subset, syzygies, GroebnerError, Ideal, Membership, ModuleVector};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FittingError {
    #[error("a map germ needs at least one component")]
    Empty,
    #[error("component {index} does not vanish at the origin")]
    NonZeroConstant { index: usize },
    #[error("vector has {got} entries, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("components live over different variable lists")]
    VariableMismatch,
    #[error("component {index} of phi has no polynomial lift; remainder {witness}")]
    NotInIdeal { index: usize, witness: Polynomial },
    #[error("all maximal minors vanish: the Fitting ideal is zero")]
    DegenerateIdeal,
    #[error("f is not primitive for the ideal: {failure} has remainder {remainder}")]
    NotPrimitive { failure: PrimitiveFailure, remainder: Polynomial },
    #[error("supplied vector {index} is not a valid lift or relation")]
    UnsoundColumn { index: usize },
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Which part of the primitive-membership test failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimitiveFailure {
    Function,
    /// 1-based variable index of the failing partial derivative.
    Derivative(usize),
}

impl std::fmt::Display for PrimitiveFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PrimitiveFailure::Function => write!(f, "f"),
            PrimitiveFailure::Derivative(j) => write!(f, "df/dx{j}"),
        }
    }
}

/// Polynomial map germ `(C^n, 0) → (C^p, 0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapGerm {
    components: Vec<Polynomial>,
}

impl MapGerm {
    pub fn new(components: Vec<Polynomial>) -> Result<Self, FittingError> {
        let first = components.first().ok_or(FittingError::Empty)?;
        if components.iter().any(|c| !same_vars(c.vars(), first.vars())) {
            return Err(FittingError::VariableMismatch);
        }
        if let Some(index) = components.iter().position(|c| !num_traits::Zero::is_zero(&c.constant_term())) {
            return Err(FittingError::NonZeroConstant { index });
        }
        Ok(MapGerm { components })
    }

    /// The gradient map of `f`.
    pub fn gradient(f: &Polynomial) -> Result<Self, FittingError> {
        Self::new(f.gradient())
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn vars(&self) -> &VarList {
        self.components[0].vars()
    }

    pub fn ideal(&self) -> Ideal {
        Ideal::new(self.components.clone()).expect("non-empty, consistent variables")
    }
}

/// Lifts, relations and the matrix `λ = [lifts | relations]`.
#[derive(Clone, Debug)]
pub struct LambdaMatrix {
    pub lifts: Vec<ModuleVector>,
    pub relations: Vec<ModuleVector>,
    pub lambda: PolyMatrix,
}

#[derive(Clone, Debug)]
pub struct FittingResult {
    pub lifts: Vec<ModuleVector>,
    pub relations: Vec<ModuleVector>,
    pub lambda: PolyMatrix,
    /// Nonzero maximal minors of `λ`, in row-then-column lexicographic order.
    pub minors: Vec<Polynomial>,
    pub ideal: Ideal,
}

/// `σ(v) = Σ v_i ψ_i`.
pub fn sigma_apply(v: &ModuleVector, psi: &MapGerm) -> Result<Polynomial, FittingError> {
    if v.rank() != psi.len() {
        return Err(FittingError::LengthMismatch { expected: psi.len(), got: v.rank() });
    }
    Ok(v.dot(psi.components()))
}

/// Checks `f ∈ I` and `∂f/∂x_j ∈ I` for all `j`; returns the first failure.
pub fn primitive_member(f: &Polynomial, ideal: &Ideal) -> Result<Option<(PrimitiveFailure, Polynomial)>, FittingError> {
    if !num_traits::Zero::is_zero(&f.constant_term()) {
        return Err(FittingError::NonZeroConstant { index: 0 });
    }
    if !same_vars(f.vars(), ideal.vars()) {
        return Err(FittingError::VariableMismatch);
    }
    let r = ideal.normal_form(f);
    if !r.is_zero() {
        return Ok(Some((PrimitiveFailure::Function, r)));
    }
    for (j, d) in f.gradient().iter().enumerate() {
        let r = ideal.normal_form(d);
        if !r.is_zero() {
            return Ok(Some((PrimitiveFailure::Derivative(j + 1), r)));
        }
    }
    Ok(None)
}

/// Lifts every `φ_j` through `σ` and appends the relations among the `ψ_i`.
pub fn build_lambda(psi: &MapGerm, phi: &MapGerm) -> Result<LambdaMatrix, FittingError> {
    if !same_vars(psi.vars(), phi.vars()) {
        return Err(FittingError::VariableMismatch);
    }
    let psi_ideal = psi.ideal();
    if let Some(w) = ideal_subset(&phi.ideal(), &psi_ideal)? {
        return Err(FittingError::NotInIdeal { index: w.index, witness: w.remainder });
    }
    let mut lifts = Vec::with_capacity(phi.len());
    for (index, c) in phi.components().iter().enumerate() {
        match psi_ideal.member(c) {
            Membership::Member(cert) => lifts.push(cert.cofactors),
            Membership::NotMember { witness } => return Err(FittingError::NotInIdeal { index, witness }),
        }
    }
    let relations = syzygies(psi.components())?;
    assemble(psi, lifts, relations)
}

fn assemble(
    psi: &MapGerm,
    lifts: Vec<ModuleVector>,
    relations: Vec<ModuleVector>,
) -> Result<LambdaMatrix, FittingError> {
    let columns: Vec<Vec<Polynomial>> = lifts.iter().chain(&relations).map(|v| v.entries.clone()).collect();
    if let Some(bad) = columns.iter().find(|c| c.len() != psi.len()) {
        return Err(FittingError::LengthMismatch { expected: psi.len(), got: bad.len() });
    }
    let lambda = PolyMatrix::from_columns(&columns)?;
    Ok(LambdaMatrix { lifts, relations, lambda })
}

/// Nonzero maximal minors, computed in parallel with deterministic order.
fn maximal_minors(lambda: &PolyMatrix) -> Vec<Polynomial> {
    let p = lambda.rows();
    if lambda.cols() < p {
        return Vec::new();
    }
    let rows: Vec<usize> = (0..p).collect();
    combinations(lambda.cols(), p)
        .into_par_iter()
        .map(|cols| lambda.sub_determinant(&rows, &cols, 0))
        .collect::<Vec<_>>()
        .into_iter()
        .filter(|m| !m.is_zero())
        .collect()
}

fn finish(l: LambdaMatrix) -> Result<FittingResult, FittingError> {
    let minors = maximal_minors(&l.lambda);
    if minors.is_empty() {
        return Err(FittingError::DegenerateIdeal);
    }
    let ideal = Ideal::new(minors.clone())?;
    Ok(FittingResult { lifts: l.lifts, relations: l.relations, lambda: l.lambda, minors, ideal })
}

/// `K = Fitt_0(R^p / M)` with `M = σ^{-1}(⟨φ⟩)`.
pub fn fitting_ideal(psi: &MapGerm, phi: &MapGerm) -> Result<FittingResult, FittingError> {
    finish(build_lambda(psi, phi)?)
}

/// Fitting ideal from caller-supplied lifts and relations, each checked exactly.
pub fn fitting_from_parts(
    psi: &MapGerm,
    phi: &MapGerm,
    lifts: Vec<ModuleVector>,
    relations: Vec<ModuleVector>,
) -> Result<FittingResult, FittingError> {
    if lifts.len() != phi.len() {
        return Err(FittingError::LengthMismatch { expected: phi.len(), got: lifts.len() });
    }
    for (index, (h, target)) in lifts.iter().zip(phi.components()).enumerate() {
        if &sigma_apply(h, psi)? != target {
            return Err(FittingError::UnsoundColumn { index });
        }
    }
    for (k, r) in relations.iter().enumerate() {
        if !sigma_apply(r, psi)?.is_zero() {
            return Err(FittingError::UnsoundColumn { index: lifts.len() + k });
        }
    }
    finish(assemble(psi, lifts, relations)?)
}

/// `K_f`: the Fitting ideal for `φ = ∇f`, after checking that `f` is primitive
/// for `⟨ψ⟩`.
pub fn kf_pipeline(psi: &MapGerm, f: &Polynomial) -> Result<FittingResult, FittingError> {
    if let Some((failure, remainder)) = primitive_member(f, &psi.ideal())? {
        return Err(FittingError::NotPrimitive { failure, remainder });
    }
    fitting_ideal(psi, &MapGerm::gradient(f)?)
}

/// Exact check of `K·⟨ψ⟩ ⊂ ⟨φ⟩` on generators: returns the first failing
/// (minor index, component index) pair.
pub fn check_k_psi_in_phi(result: &FittingResult, psi: &MapGerm, phi: &MapGerm) -> Option<(usize, usize)> {
    let phi_ideal = phi.ideal();
    for (a, m) in result.minors.iter().enumerate() {
        for (i, p) in psi.components().iter().enumerate() {
            if !phi_ideal.contains(&(m * p)) {
                return Some((a, i));
            }
        }
    }
    None
}
