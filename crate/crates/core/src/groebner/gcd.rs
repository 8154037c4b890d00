use crate::algebra::Polynomial;

use super::{syzygies, GroebnerError, Ideal};

/// Monic greatest common divisor, read off the relation module of `(a, b)`:
/// it is free of rank one, generated by `(b/h, −a/h)` with `h = gcd(a, b)`,
/// so the first entries of any generating set span the principal ideal
/// `⟨b/h⟩`. `None` only if that fails to come out principal.
pub fn gcd(a: &Polynomial, b: &Polynomial) -> Result<Option<Polynomial>, GroebnerError> {
    if a.is_zero() && b.is_zero() {
        return Err(GroebnerError::AllZero);
    }
    if a.is_zero() {
        return Ok(Some(b.monic()));
    }
    if b.is_zero() {
        return Ok(Some(a.monic()));
    }
    if a.is_constant() || b.is_constant() {
        return Ok(Some(Polynomial::one(a.vars())));
    }
    let firsts: Vec<Polynomial> =
        syzygies(&[a.clone(), b.clone()])?.into_iter().map(|s| s.entries[0].clone()).filter(|p| !p.is_zero()).collect();
    if firsts.is_empty() {
        return Ok(None);
    }
    let basis = Ideal::new(firsts)?.basis().to_vec();
    if let [q] = basis.as_slice() {
        if let Some(h) = b.div_exact(q) {
            if a.div_exact(&h).is_some() {
                return Ok(Some(h.monic()));
            }
        }
    }
    Ok(None)
}

/// Product of the distinct irreducible factors of `g`, made monic:
/// `g / gcd(g, ∂g/∂x_1, …, ∂g/∂x_n)`. Same complex zero set as `g`.
pub fn squarefree_part(g: &Polynomial) -> Result<Option<Polynomial>, GroebnerError> {
    if g.is_zero() {
        return Err(GroebnerError::AllZero);
    }
    let mut h = g.clone();
    for d in g.gradient() {
        if h.is_constant() {
            break;
        }
        match gcd(&h, &d)? {
            Some(next) => h = next,
            None => return Ok(None),
        }
    }
    Ok(g.div_exact(&h).map(|q| q.monic()))
}
