//! Buchberger's algorithm over the rationals with optional tracking of how
//! each basis element is expressed in the input generators.

use std::collections::BTreeSet;

use num_traits::One;

use crate::algebra::{Monomial, Polynomial, Rational, VarList};

/// A basis element with its representation `poly = Σ cofactors_i · gens_i`.
#[derive(Clone, Debug)]
pub(crate) struct Tracked {
    pub poly: Polynomial,
    pub cofactors: Option<Vec<Polynomial>>,
}

impl Tracked {
    fn sub_scaled(&mut self, c: &Rational, m: &Monomial, other: &Tracked) {
        let neg = -c.clone();
        self.poly.add_scaled(&neg, m, &other.poly);
        if let (Some(mine), Some(theirs)) = (self.cofactors.as_mut(), other.cofactors.as_ref()) {
            for (a, b) in mine.iter_mut().zip(theirs) {
                a.add_scaled(&neg, m, b);
            }
        }
    }

    fn scale(&mut self, c: &Rational) {
        self.poly = self.poly.scale(c);
        if let Some(cof) = self.cofactors.as_mut() {
            for p in cof.iter_mut() {
                *p = p.scale(c);
            }
        }
    }
}

/// Result of dividing a polynomial by an ordered list of divisors.
#[derive(Clone, Debug)]
pub struct Division {
    pub quotients: Vec<Polynomial>,
    pub remainder: Polynomial,
}

/// Full multivariate division: every term of the remainder is irreducible by
/// the leading monomials of `divisors`; `p = Σ quotients_k·divisors_k + remainder`.
pub fn divide(p: &Polynomial, divisors: &[Polynomial]) -> Division {
    let vars = p.vars().clone();
    let mut work = p.clone();
    let mut remainder = Polynomial::zero(&vars);
    let mut quotients = vec![Polynomial::zero(&vars); divisors.len()];
    let leads: Vec<Option<(Monomial, Rational)>> =
        divisors.iter().map(|d| d.leading().map(|(m, c)| (m.clone(), c.clone()))).collect();
    while let Some((m, c)) = work.leading().map(|(m, c)| (m.clone(), c.clone())) {
        let hit = leads.iter().enumerate().find_map(|(k, l)| {
            let (lm, lc) = l.as_ref()?;
            lm.quotient_of(&m).map(|q| (k, q, &c / lc))
        });
        match hit {
            Some((k, qm, qc)) => {
                work.add_scaled(&-qc.clone(), &qm, &divisors[k]);
                quotients[k].add_term(qm, qc);
            }
            None => {
                work.remove_term(&m);
                remainder.add_term(m, c);
            }
        }
    }
    Division { quotients, remainder }
}

/// Reduces `t` fully by `basis`, updating its cofactors.
fn reduce_tracked(mut t: Tracked, basis: &[Tracked]) -> Tracked {
    let vars = t.poly.vars().clone();
    let mut rem = Tracked {
        poly: Polynomial::zero(&vars),
        cofactors: t.cofactors.as_ref().map(|c| vec![Polynomial::zero(&vars); c.len()]),
    };
    while let Some((m, c)) = t.poly.leading().map(|(m, c)| (m.clone(), c.clone())) {
        let hit = basis.iter().find_map(|b| {
            let (lm, lc) = b.poly.leading()?;
            lm.quotient_of(&m).map(|q| (b, q, &c / lc))
        });
        match hit {
            Some((b, qm, qc)) => t.sub_scaled(&qc, &qm, b),
            None => {
                t.poly.remove_term(&m);
                rem.poly.add_term(m, c);
            }
        }
    }
    // cofactors follow the whole element, not only the remainder terms
    rem.cofactors = t.cofactors;
    rem
}

fn s_polynomial(a: &Tracked, b: &Tracked) -> Tracked {
    let (la, ca) = a.poly.leading().expect("nonzero");
    let (lb, cb) = b.poly.leading().expect("nonzero");
    let l = la.lcm(lb);
    let ma = la.quotient_of(&l).expect("lcm");
    let mb = lb.quotient_of(&l).expect("lcm");
    let vars = a.poly.vars().clone();
    let mut s = Tracked {
        poly: Polynomial::zero(&vars),
        cofactors: a.cofactors.as_ref().map(|c| vec![Polynomial::zero(&vars); c.len()]),
    };
    s.sub_scaled(&-ca.recip(), &ma, a);
    s.sub_scaled(&cb.recip(), &mb, b);
    s
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Pair {
    degree: u32,
    lcm: Monomial,
    i: usize,
    j: usize,
}

/// Computes the reduced Gröbner basis of `gens` (grevlex). With `track`, each
/// element carries its cofactors over `gens`. Zero generators are allowed and
/// simply contribute nothing. Returns an empty basis for the zero ideal.
pub(crate) fn groebner(vars: &VarList, gens: &[Polynomial], track: bool) -> Vec<Tracked> {
    let m = gens.len();
    let mut basis: Vec<Tracked> = Vec::new();
    let mut pairs: BTreeSet<Pair> = BTreeSet::new();
    let mut pending: BTreeSet<(usize, usize)> = BTreeSet::new();

    let unit = |i: usize| -> Option<Vec<Polynomial>> {
        if !track {
            return None;
        }
        let mut v = vec![Polynomial::zero(vars); m];
        v[i] = Polynomial::one(vars);
        Some(v)
    };

    let mut queue: Vec<Tracked> =
        gens.iter().enumerate().map(|(i, g)| Tracked { poly: g.clone(), cofactors: unit(i) }).collect();
    // smallest leading monomial first keeps early reductions cheap
    queue.sort_by(|a, b| b.poly.leading_monomial().cmp(&a.poly.leading_monomial()));

    let insert =
        |t: Tracked, basis: &mut Vec<Tracked>, pairs: &mut BTreeSet<Pair>, pending: &mut BTreeSet<(usize, usize)>| {
            let mut t = t;
            let lc = t.poly.leading().expect("nonzero").1.clone();
            t.scale(&lc.recip());
            let k = basis.len();
            let lk = t.poly.leading_monomial().expect("nonzero").clone();
            basis.push(t);
            for (i, b) in basis.iter().enumerate().take(k) {
                let li = b.poly.leading_monomial().expect("nonzero");
                let l = li.lcm(&lk);
                pairs.insert(Pair { degree: l.degree(), lcm: l, i, j: k });
                pending.insert((i, k));
            }
        };

    while let Some(t) = queue.pop() {
        let r = reduce_tracked(t, &basis);
        if !r.poly.is_zero() {
            insert(r, &mut basis, &mut pairs, &mut pending);
        }
    }

    while let Some(p) = pairs.pop_first() {
        pending.remove(&(p.i, p.j));
        let li = basis[p.i].poly.leading_monomial().expect("nonzero").clone();
        let lj = basis[p.j].poly.leading_monomial().expect("nonzero").clone();
        if li.is_coprime(&lj) {
            continue;
        }
        // chain criterion: some k with lm_k | lcm whose pairs with i and j are done
        let chain = (0..basis.len()).any(|k| {
            if k == p.i || k == p.j {
                return false;
            }
            let lk = basis[k].poly.leading_monomial().expect("nonzero");
            let key = |a: usize, b: usize| if a < b { (a, b) } else { (b, a) };
            lk.divides(&p.lcm) && !pending.contains(&key(p.i, k)) && !pending.contains(&key(p.j, k))
        });
        if chain {
            continue;
        }
        let s = s_polynomial(&basis[p.i], &basis[p.j]);
        let r = reduce_tracked(s, &basis);
        if !r.poly.is_zero() {
            insert(r, &mut basis, &mut pairs, &mut pending);
        }
    }

    interreduce(basis)
}

/// Turns a Gröbner basis into the reduced one: minimal leading monomials,
/// monic, tails fully reduced. Output sorted by increasing leading monomial.
fn interreduce(basis: Vec<Tracked>) -> Vec<Tracked> {
    let mut minimal: Vec<Tracked> = Vec::new();
    let leads: Vec<Monomial> = basis.iter().map(|t| t.poly.leading_monomial().expect("nonzero").clone()).collect();
    for (i, t) in basis.into_iter().enumerate() {
        let li = &leads[i];
        let redundant = leads.iter().enumerate().any(|(j, lj)| j != i && lj.divides(li) && (lj != li || j < i));
        if !redundant {
            minimal.push(t);
        }
    }
    minimal.sort_by(|a, b| a.poly.leading_monomial().cmp(&b.poly.leading_monomial()));
    let mut out: Vec<Tracked> = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<Tracked> =
            minimal.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, t)| t.clone()).collect();
        let t = minimal[i].clone();
        // the leading term is irreducible by the others; reduce the tail only
        let (lm, lc) = t.poly.leading().map(|(m, c)| (m.clone(), c.clone())).expect("nonzero");
        let mut head = t.clone();
        head.poly = Polynomial::monomial(t.poly.vars(), lm.clone(), lc.clone());
        let mut tail = t;
        tail.poly.remove_term(&lm);
        if let Some(c) = tail.cofactors.as_mut() {
            // cofactors stay with the head so the sum is preserved
            for p in c.iter_mut() {
                *p = Polynomial::zero(p.vars());
            }
        }
        let reduced_tail = reduce_tracked(tail, &others);
        let mut r = head;
        r.poly = &r.poly + &reduced_tail.poly;
        if let (Some(a), Some(b)) = (r.cofactors.as_mut(), reduced_tail.cofactors.as_ref()) {
            for (x, y) in a.iter_mut().zip(b) {
                *x = &*x + y;
            }
        }
        let lc = r.poly.leading().expect("nonzero").1.clone();
        if !lc.is_one() {
            r.scale(&lc.recip());
        }
        out.push(r);
    }
    out
}
