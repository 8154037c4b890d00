//! Exact polynomial arithmetic over the rationals, expression parsing,
//! complex evaluation and minors of polynomial matrices.

mod complex;
mod matrix;
mod monomial;
mod parse;
mod poly;

pub use complex::{evaluate, CompiledPoly, ComplexPoint};
pub use matrix::{combinations, minors, Minor, PolyMatrix};
pub use monomial::Monomial;
pub use parse::parse_poly;
pub use poly::{poly_arith, rational_to_f64, same_vars, var_list, ArithOp, Operand, Polynomial, VarList};

/// Coefficient field: arbitrary-precision rationals in lowest terms.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("syntax error at {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown identifier '{name}' at {position}")]
    UnknownIdentifier { name: String, position: usize },
    #[error("variable lists differ: {left:?} vs {right:?}")]
    VariableMismatch { left: Vec<String>, right: Vec<String> },
    #[error("index {index} out of range for {len} variables")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("operand kind does not match operation {0}")]
    OperandKind(String),
    #[error("matrix shape {rows}x{cols} does not fit {entries} entries")]
    Shape { rows: usize, cols: usize, entries: usize },
    #[error("minor size {k} out of range for a {rows}x{cols} matrix")]
    MinorSize { k: usize, rows: usize, cols: usize },
    #[error("point has {got} coordinates, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point has non-finite coordinates")]
    NonFinitePoint,
}

/// Partial derivative with respect to the `i`-th variable, 1-based.
pub fn derive(p: &Polynomial, i: usize) -> Result<Polynomial, AlgebraError> {
    if i == 0 {
        return Err(AlgebraError::IndexOutOfRange { index: 0, len: p.nvars() });
    }
    p.derive(i - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v2() -> VarList {
        var_list(&["x1", "x2"])
    }

    #[test]
    fn arith_examples() {
        let v = v2();
        let x1 = parse_poly("x1", &v).unwrap();
        let zero = poly_arith(ArithOp::Add, &x1, Operand::Poly(&-&x1)).unwrap();
        assert!(zero.is_zero());
        let s = parse_poly("x1+x2", &v).unwrap();
        assert_eq!(
            poly_arith(ArithOp::Pow, &s, Operand::Exponent(2)).unwrap(),
            parse_poly("x1^2+2*x1*x2+x2^2", &v).unwrap()
        );
        let q = parse_poly("x1^2+x2^4", &v).unwrap();
        assert_eq!(
            poly_arith(ArithOp::Mul, &q, Operand::Poly(&q)).unwrap(),
            parse_poly("x1^4+2*x1^2*x2^4+x2^8", &v).unwrap()
        );
        assert!(poly_arith(ArithOp::Pow, &q, Operand::Poly(&q)).is_err());
    }

    #[test]
    fn variable_mismatch_is_an_error() {
        let a = parse_poly("x1", &v2()).unwrap();
        let b = parse_poly("x1", &var_list(&["x1", "y"])).unwrap();
        assert!(matches!(a.checked_add(&b), Err(AlgebraError::VariableMismatch { .. })));
        assert!(matches!(poly_arith(ArithOp::Mul, &a, Operand::Poly(&b)), Err(AlgebraError::VariableMismatch { .. })));
    }

    #[test]
    fn derivative_examples() {
        let v = v2();
        let f = parse_poly("(x1^2+x2^4)^2", &v).unwrap();
        assert_eq!(derive(&f, 1).unwrap(), parse_poly("4*x1*(x1^2+x2^4)", &v).unwrap());
        assert_eq!(derive(&f, 2).unwrap(), parse_poly("8*x2^3*(x1^2+x2^4)", &v).unwrap());
        assert!(derive(&f, 0).is_err());
        assert!(derive(&f, 3).is_err());
    }

    #[test]
    fn derivative_of_three_variable_example() {
        // d/dx1 of P^2 Q with P = x1^2+x2^2+x3^4, Q = x1^2+x2^2, checked
        // against the factored product-rule form.
        let v = var_list(&["x1", "x2", "x3"]);
        let f = parse_poly("(x1^2+x2^2+x3^4)^2*(x1^2+x2^2)", &v).unwrap();
        let expected = parse_poly("2*x1*(x1^2+x2^2+x3^4)*(3*x1^2+3*x2^2+x3^4)", &v).unwrap();
        assert_eq!(derive(&f, 1).unwrap(), expected);
        // and an independent expansion of the same product rule
        let p = parse_poly("x1^2+x2^2+x3^4", &v).unwrap();
        let q = parse_poly("x1^2+x2^2", &v).unwrap();
        let two_x1 = parse_poly("2*x1", &v).unwrap();
        let rule = &(&(&p * &two_x1) * &q) * &Polynomial::from_int(&v, 2) + &p * &p * two_x1;
        assert_eq!(rule, expected);
    }

    fn small_poly() -> impl Strategy<Value = Polynomial> {
        prop::collection::vec(((-5i64..=5), 0u32..4, 0u32..4), 0..6).prop_map(|ts| {
            let v = var_list(&["x1", "x2"]);
            Polynomial::from_terms(
                &v,
                ts.into_iter()
                    .map(|(c, a, b)| (Monomial::from_exponents(vec![a, b]), Rational::from_integer(c.into()))),
            )
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in small_poly(), b in small_poly(), c in small_poly()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
        }

        #[test]
        fn leibniz_rule(a in small_poly(), b in small_poly(), i in 0usize..2) {
            let lhs = (&a * &b).derive(i).unwrap();
            let rhs = &a.derive(i).unwrap() * &b + &a * &b.derive(i).unwrap();
            prop_assert_eq!(lhs, rhs);
            let lin = (&a + &b).derive(i).unwrap();
            prop_assert_eq!(lin, a.derive(i).unwrap() + b.derive(i).unwrap());
        }

        #[test]
        fn print_parse_roundtrip(a in small_poly()) {
            let back = parse_poly(&a.to_string(), a.vars()).unwrap();
            prop_assert_eq!(back, a);
        }
    }
}
