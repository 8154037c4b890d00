use crate::algebra::{var_list, Monomial, Polynomial, Rational, VarList};

use super::{divide, GroebnerError, Ideal, ModuleVector};

/// Generators of the module of relations `{k : Σ k_i·gens_i = 0}`.
///
/// Schreyer's construction: every S-pair of the reduced basis reduces to zero
/// and so yields a relation among basis elements; these, moved back to the
/// original generators through the cofactor matrix, together with the
/// relations `e_i − (gens_i expressed through the basis)`, generate the module.
pub fn syzygies(gens: &[Polynomial]) -> Result<Vec<ModuleVector>, GroebnerError> {
    let ideal = Ideal::new(gens.to_vec())?;
    let vars = ideal.vars().clone();
    let m = gens.len();
    let tracked = ideal.tracked_basis();
    let basis: Vec<Polynomial> = tracked.iter().map(|(p, _)| p.clone()).collect();
    let rows: Vec<&Vec<Polynomial>> = tracked.iter().map(|(_, c)| c).collect();

    let to_gens = |coeffs: &[Polynomial]| -> ModuleVector {
        let mut out = vec![Polynomial::zero(&vars); m];
        for (c, row) in coeffs.iter().zip(&rows) {
            if c.is_zero() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(row.iter()) {
                *o = &*o + &(c * a);
            }
        }
        ModuleVector::new(out)
    };

    let mut out: Vec<ModuleVector> = Vec::new();
    let push = |v: ModuleVector, out: &mut Vec<ModuleVector>| {
        if v.is_zero() {
            return;
        }
        let v = normalize(v);
        if !out.contains(&v) {
            out.push(v);
        }
    };

    for a in 0..basis.len() {
        for b in a + 1..basis.len() {
            let (la, ca) = basis[a].leading().expect("nonzero");
            let (lb, cb) = basis[b].leading().expect("nonzero");
            let l = la.lcm(lb);
            let ma = la.quotient_of(&l).expect("lcm");
            let mb = lb.quotient_of(&l).expect("lcm");
            let mut s = basis[a].mul_monomial(&ca.recip(), &ma);
            s.add_scaled(&-cb.recip(), &mb, &basis[b]);
            let d = divide(&s, &basis);
            debug_assert!(d.remainder.is_zero());
            let mut coeffs: Vec<Polynomial> = d.quotients.iter().map(|q| -q).collect();
            coeffs[a].add_term(ma, ca.recip());
            coeffs[b].add_term(mb, -cb.recip());
            push(to_gens(&coeffs), &mut out);
        }
    }

    for (i, g) in gens.iter().enumerate() {
        let d = divide(g, &basis);
        debug_assert!(d.remainder.is_zero());
        let mut v = to_gens(&d.quotients);
        for e in v.entries.iter_mut() {
            *e = -&*e;
        }
        v.entries[i] = &v.entries[i] + &Polynomial::one(&vars);
        push(v, &mut out);
    }
    Ok(out)
}

/// Scales so the leading coefficient of the first nonzero entry is 1.
fn normalize(v: ModuleVector) -> ModuleVector {
    let c = v.entries.iter().find_map(|e| e.leading().map(|(_, c)| c.clone())).expect("nonzero vector");
    let inv = c.recip();
    ModuleVector::new(v.entries.iter().map(|e| e.scale(&inv)).collect())
}

/// Whether `v` lies in the submodule of `R^p` generated by `gens`.
///
/// The free module is embedded in a ring with extra variables `e_1..e_p`,
/// a vector becoming the linear form `Σ v_i e_i`; the submodule is then the
/// part of `e`-degree one of the ideal generated by the images of `gens` and
/// all products `e_i e_j`.
pub fn module_member(v: &ModuleVector, gens: &[ModuleVector]) -> Result<bool, GroebnerError> {
    let p = v.rank();
    if gens.iter().any(|g| g.rank() != p) {
        return Err(GroebnerError::RankMismatch);
    }
    if v.is_zero() {
        return Ok(true);
    }
    let base = v.entries[0].vars().clone();
    let n = base.len();
    let mut names: Vec<String> = base.iter().cloned().collect();
    names.extend((1..=p).map(|i| format!("__e{i}")));
    let ext: VarList = var_list(&names);
    let e = |i: usize| Monomial::variable(n + p, n + i);
    let embed = |w: &ModuleVector| -> Polynomial {
        let mut acc = Polynomial::zero(&ext);
        for (i, x) in w.entries.iter().enumerate() {
            acc.add_scaled(&Rational::from_integer(1.into()), &e(i), &x.extend_vars(&ext));
        }
        acc
    };
    let mut ideal_gens: Vec<Polynomial> = gens.iter().map(embed).filter(|g| !g.is_zero()).collect();
    for i in 0..p {
        for j in i..p {
            ideal_gens.push(Polynomial::monomial(&ext, e(i).mul(&e(j)), Rational::from_integer(1.into())));
        }
    }
    let ideal = Ideal::new(ideal_gens)?;
    Ok(ideal.contains(&embed(v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_poly;
    use proptest::prelude::*;

    fn polys(v: &VarList, texts: &[&str]) -> Vec<Polynomial> {
        texts.iter().map(|t| parse_poly(t, v).unwrap()).collect()
    }

    fn koszul(gens: &[Polynomial], k: usize, l: usize) -> ModuleVector {
        let vars = gens[0].vars();
        let mut v = ModuleVector::zero(vars, gens.len());
        v.entries[k] = gens[l].clone();
        v.entries[l] = -&gens[k];
        v
    }

    #[test]
    fn koszul_relation_of_two_coordinates() {
        let v = var_list(&["x1", "x2"]);
        let g = polys(&v, &["x1", "x2"]);
        let s = syzygies(&g).unwrap();
        assert!(!s.is_empty());
        for k in &s {
            assert!(k.dot(&g).is_zero());
        }
        assert!(module_member(&koszul(&g, 0, 1), &s).unwrap());
        let bogus = ModuleVector::new(polys(&v, &["1", "0"]));
        assert!(!module_member(&bogus, &s).unwrap());
    }

    #[test]
    fn three_coordinates_contain_all_koszul_relations() {
        let v = var_list(&["x1", "x2", "x3"]);
        let g = polys(&v, &["x1", "x2", "x3"]);
        let s = syzygies(&g).unwrap();
        for k in &s {
            assert!(k.dot(&g).is_zero());
        }
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            assert!(module_member(&koszul(&g, a, b), &s).unwrap());
        }
    }

    #[test]
    fn single_nonzero_generator_has_no_relations() {
        let v = var_list(&["x1", "x2"]);
        assert!(syzygies(&polys(&v, &["x1^2+x2^4"])).unwrap().is_empty());
        assert!(syzygies(&polys(&v, &["3*x1^2+x2^4"])).unwrap().is_empty());
    }

    #[test]
    fn zero_generator_is_its_own_relation() {
        let v = var_list(&["x1", "x2"]);
        let g = polys(&v, &["x1", "0"]);
        let s = syzygies(&g).unwrap();
        let e2 = ModuleVector::new(polys(&v, &["0", "1"]));
        assert!(module_member(&e2, &s).unwrap());
    }

    fn small_poly() -> impl Strategy<Value = Polynomial> {
        prop::collection::vec(((-3i64..=3), 0u32..3, 0u32..3), 1..4).prop_map(|ts| {
            let v = var_list(&["x1", "x2"]);
            Polynomial::from_terms(
                &v,
                ts.into_iter()
                    .map(|(c, a, b)| (Monomial::from_exponents(vec![a, b]), Rational::from_integer(c.into()))),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn syzygy_soundness_and_koszul_completeness(gens in prop::collection::vec(small_poly(), 2..4)) {
            prop_assume!(gens.iter().any(|g| !g.is_zero()));
            let s = syzygies(&gens).unwrap();
            for k in &s {
                prop_assert!(k.dot(&gens).is_zero());
            }
            prop_assert!(module_member(&koszul(&gens, 0, 1), &s).unwrap());
        }
    }
}
