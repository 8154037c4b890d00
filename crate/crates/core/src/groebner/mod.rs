//! Ideal computations by Buchberger's algorithm: normal forms, membership
//! with cofactor certificates, syzygy modules and ideal comparison.
//!
//! All computations take place in the polynomial ring with the graded reverse
//! lexicographic order.

mod engine;
mod gcd;
mod syzygy;

use std::sync::OnceLock;

use crate::algebra::{same_vars, Polynomial, VarList};

pub use engine::{divide, Division};
pub use gcd::{gcd, squarefree_part};
pub use syzygy::{module_member, syzygies};

use engine::Tracked;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroebnerError {
    #[error("an ideal needs at least one generator")]
    NoGenerators,
    #[error("all generators are zero")]
    AllZero,
    #[error("generators live over different variable lists")]
    VariableMismatch,
    #[error("module vectors have inconsistent lengths")]
    RankMismatch,
}

/// Monomial order used for Gröbner bases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MonomialOrder {
    #[default]
    Grevlex,
}

/// Element of a free module `R^p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleVector {
    pub entries: Vec<Polynomial>,
}

impl ModuleVector {
    pub fn new(entries: Vec<Polynomial>) -> Self {
        ModuleVector { entries }
    }

    pub fn zero(vars: &VarList, rank: usize) -> Self {
        ModuleVector { entries: vec![Polynomial::zero(vars); rank] }
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Polynomial::is_zero)
    }

    /// `Σ entries_i · gens_i`.
    pub fn dot(&self, gens: &[Polynomial]) -> Polynomial {
        assert_eq!(self.entries.len(), gens.len());
        let vars = gens[0].vars();
        self.entries.iter().zip(gens).fold(Polynomial::zero(vars), |acc, (a, g)| acc + a * g)
    }

    pub fn add(&self, other: &ModuleVector) -> ModuleVector {
        ModuleVector { entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect() }
    }

    pub fn scale_by(&self, p: &Polynomial) -> ModuleVector {
        ModuleVector { entries: self.entries.iter().map(|a| a * p).collect() }
    }
}

/// Membership certificate: `p = Σ cofactors_i · generators_i + remainder`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub cofactors: ModuleVector,
    pub remainder: Polynomial,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    Member(Certificate),
    NotMember { witness: Polynomial },
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member(_))
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Membership::Member(c) => Some(c),
            Membership::NotMember { .. } => None,
        }
    }
}

/// A generator of one ideal that fails to lie in another.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetWitness {
    pub index: usize,
    pub generator: Polynomial,
    pub remainder: Polynomial,
}

/// Ideal given by generators; its reduced Gröbner basis and the tracked basis
/// are computed on first use and cached.
#[derive(Clone, Debug)]
pub struct Ideal {
    vars: VarList,
    generators: Vec<Polynomial>,
    order: MonomialOrder,
    basis: OnceLock<Vec<Polynomial>>,
    tracked: OnceLock<Vec<Tracked>>,
}

impl Ideal {
    pub fn new(generators: Vec<Polynomial>) -> Result<Self, GroebnerError> {
        let first = generators.first().ok_or(GroebnerError::NoGenerators)?;
        let vars = first.vars().clone();
        if generators.iter().any(|g| !same_vars(g.vars(), &vars)) {
            return Err(GroebnerError::VariableMismatch);
        }
        Ok(Ideal { vars, generators, order: MonomialOrder::Grevlex, basis: OnceLock::new(), tracked: OnceLock::new() })
    }

    pub fn vars(&self) -> &VarList {
        &self.vars
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    /// Reduced Gröbner basis, sorted by increasing leading monomial. Empty for
    /// the zero ideal.
    pub fn basis(&self) -> &[Polynomial] {
        self.basis.get_or_init(|| match self.tracked.get() {
            Some(t) => t.iter().map(|x| x.poly.clone()).collect(),
            None => engine::groebner(&self.vars, &self.generators, false).into_iter().map(|t| t.poly).collect(),
        })
    }

    fn tracked(&self) -> &[Tracked] {
        self.tracked.get_or_init(|| engine::groebner(&self.vars, &self.generators, true))
    }

    pub fn is_zero(&self) -> bool {
        self.basis().is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.basis().iter().any(|g| g.is_constant() && !g.is_zero())
    }

    pub fn normal_form(&self, p: &Polynomial) -> Polynomial {
        divide(p, self.basis()).remainder
    }

    pub fn contains(&self, p: &Polynomial) -> bool {
        self.normal_form(p).is_zero()
    }

    /// Membership with cofactors over the original generators.
    pub fn member(&self, p: &Polynomial) -> Membership {
        if !self.contains(p) {
            return Membership::NotMember { witness: self.normal_form(p) };
        }
        let tracked = self.tracked();
        let basis: Vec<Polynomial> = tracked.iter().map(|t| t.poly.clone()).collect();
        let d = divide(p, &basis);
        let m = self.generators.len();
        let mut cof = vec![Polynomial::zero(&self.vars); m];
        for (q, t) in d.quotients.iter().zip(tracked) {
            if q.is_zero() {
                continue;
            }
            let rows = t.cofactors.as_ref().expect("tracked basis");
            for (c, a) in cof.iter_mut().zip(rows) {
                *c = &*c + &(q * a);
            }
        }
        Membership::Member(Certificate { cofactors: ModuleVector::new(cof), remainder: d.remainder })
    }

    /// Cofactor matrix of the reduced basis: `basis_k = Σ rows[k][i] · generators_i`.
    pub fn basis_cofactors(&self) -> Vec<ModuleVector> {
        self.tracked().iter().map(|t| ModuleVector::new(t.cofactors.clone().expect("tracked basis"))).collect()
    }

    pub(crate) fn tracked_basis(&self) -> Vec<(Polynomial, Vec<Polynomial>)> {
        self.tracked().iter().map(|t| (t.poly.clone(), t.cofactors.clone().expect("tracked basis"))).collect()
    }
}

/// Reduced Gröbner basis of `gens`.
pub fn buchberger(gens: &[Polynomial]) -> Result<Vec<Polynomial>, GroebnerError> {
    let ideal = Ideal::new(gens.to_vec())?;
    if ideal.generators.iter().all(Polynomial::is_zero) {
        return Err(GroebnerError::AllZero);
    }
    Ok(ideal.basis().to_vec())
}

pub fn normal_form(p: &Polynomial, ideal: &Ideal) -> Polynomial {
    ideal.normal_form(p)
}

pub fn ideal_member(p: &Polynomial, ideal: &Ideal) -> Membership {
    ideal.member(p)
}

/// `Ok(None)` when every generator of `i` lies in `j`, otherwise the first
/// failing generator.
pub fn ideal_subset(i: &Ideal, j: &Ideal) -> Result<Option<SubsetWitness>, GroebnerError> {
    if !same_vars(i.vars(), j.vars()) {
        return Err(GroebnerError::VariableMismatch);
    }
    for (index, g) in i.generators().iter().enumerate() {
        let r = j.normal_form(g);
        if !r.is_zero() {
            return Ok(Some(SubsetWitness { index, generator: g.clone(), remainder: r }));
        }
    }
    Ok(None)
}

pub fn ideal_equal(i: &Ideal, j: &Ideal) -> Result<bool, GroebnerError> {
    Ok(ideal_subset(i, j)?.is_none() && ideal_subset(j, i)?.is_none())
}

/// Checks that every S-polynomial of `basis` reduces to zero modulo `basis`.
pub fn satisfies_buchberger_criterion(basis: &[Polynomial]) -> bool {
    for a in 0..basis.len() {
        for b in a + 1..basis.len() {
            let (la, ca) = basis[a].leading().expect("nonzero basis element");
            let (lb, cb) = basis[b].leading().expect("nonzero basis element");
            let l = la.lcm(lb);
            let mut s = basis[a].mul_monomial(&ca.recip(), &la.quotient_of(&l).expect("lcm"));
            s.add_scaled(&-cb.recip(), &lb.quotient_of(&l).expect("lcm"), &basis[b]);
            if !divide(&s, basis).remainder.is_zero() {
                return false;
            }
        }
    }
    true
}

/// Checks that no leading monomial divides another and that no tail term is
/// divisible by a leading monomial.
pub fn is_reduced(basis: &[Polynomial]) -> bool {
    let leads: Vec<_> = basis.iter().map(|g| g.leading_monomial().cloned()).collect();
    if leads.iter().any(Option::is_none) {
        return false;
    }
    let leads: Vec<_> = leads.into_iter().flatten().collect();
    for (k, g) in basis.iter().enumerate() {
        if !g.leading().map(|(_, c)| num_traits::One::is_one(c)).unwrap_or(false) {
            return false;
        }
        for (i, (m, _)) in g.terms().enumerate() {
            for (j, l) in leads.iter().enumerate() {
                if (i > 0 || j != k) && l.divides(m) {
                    return false;
                }
            }
        }
    }
    true
}
