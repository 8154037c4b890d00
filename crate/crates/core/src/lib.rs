//! Symbolic-numeric toolkit for determinacy of polynomial germs with
//! non-isolated singularities under flat Denjoy-Carleman perturbations.
//!
//! The pipeline runs from exact ideal theory (Fitting ideals built from
//! polynomial lifts and syzygies) through numerical Łojasiewicz-type
//! separation estimates to the sequence calculus that names the resulting
//! regularity class.

pub mod algebra;
pub mod carleman;
pub mod fitting;
pub mod groebner;
pub mod lojasiewicz;
