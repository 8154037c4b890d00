use determinacy::carleman::*;
use proptest::prelude::*;

fn ln_factorial(j: usize) -> f64 {
    (1..=j).map(|k| (k as f64).ln()).sum()
}

#[test]
fn squared_factorials_from_quadratic_theta() {
    let m = TameSequence::gevrey_log(1.0, 0.0).unwrap();
    let out = mtheta_numeric(&m, &AdmissibleFunction::power(2.0), 30, &default_tau_grid());
    for j in 1..=30 {
        let band = ((out.sequence.ln_m(j).unwrap() - 2.0 * ln_factorial(j)) / j as f64).exp();
        assert!((0.25..=4.0).contains(&band), "j={j}: {band}");
    }
    let closed = mtheta_closed_sequence(&m, &AdmissibleFunction::power(2.0)).unwrap();
    assert_eq!(compare_sequences(&out.sequence, &closed, 30).verdict, Equivalence::Equivalent);
}

#[test]
fn identity_theta_recovers_the_sequence() {
    for (a, b) in [(1.0, 0.0), (1.0, 1.0), (2.0, 0.5)] {
        let m = TameSequence::gevrey_log(a, b).unwrap();
        let out = mtheta_numeric(&m, &AdmissibleFunction::power(1.0), 30, &default_tau_grid());
        for j in 1..=30 {
            let rel = (out.sequence.ln_m(j).unwrap() - m.ln_m(j).unwrap()).abs() / j as f64;
            assert!(rel < 1e-3, "({a},{b}) j={j}: {rel}");
        }
    }
}

#[test]
fn logarithmic_theta_matches_closed_form() {
    let m = TameSequence::gevrey_log(1.0, 1.0).unwrap();
    let theta = AdmissibleFunction::new(1.0, 1.5, 1.0).unwrap();
    let out = mtheta_numeric(&m, &theta, 60, &default_tau_grid());
    let closed = mtheta_closed_sequence(&m, &theta).unwrap();
    assert_eq!(closed, TameSequence::gevrey_log(1.5, 2.5).unwrap());
    let cmp = compare_sequences(&out.sequence, &closed, 60);
    assert_eq!(cmp.verdict, Equivalence::Equivalent, "trend {} sup {}", cmp.trend, cmp.sup);
}

#[test]
fn recovery_identity_for_tabulated_sequences() {
    let cases: Vec<Vec<f64>> = vec![
        (0..=60).map(ln_factorial).collect(),
        (0..=60).map(|j| 1.5 * ln_factorial(j) + 0.3 * j as f64).collect(),
        (0..=60).map(|j| (j * j) as f64 * 0.05).collect(),
    ];
    let grid = log_grid(1e-12, 1.0, 20000);
    for lv in cases {
        let m = TameSequence::from_log_values(lv).unwrap();
        for j in 0..=30 {
            let sup = grid
                .iter()
                .map(|&t| -(j as f64) * t.ln() + h_eval(&m, t, 60).ln_value)
                .fold(f64::NEG_INFINITY, f64::max);
            let rel = (sup - m.ln_m(j).unwrap()).exp() - 1.0;
            assert!(rel.abs() < 0.01, "j={j}: {rel}");
        }
    }
}

#[test]
fn growth_bounds_and_sandwich() {
    let pairs = [
        ((1.0, 0.0), AdmissibleFunction::power(2.0)),
        ((1.0, 1.0), AdmissibleFunction::new(1.0, 1.5, 1.0).unwrap()),
        ((2.0, 0.0), AdmissibleFunction::power(1.5)),
    ];
    let grid = log_grid(1e-6, 1e-1, 200);
    for ((a, b), theta) in pairs {
        let m = TameSequence::gevrey_log(a, b).unwrap();
        let closed = mtheta_closed_sequence(&m, &theta).unwrap();
        let s = check_admissible(&theta, &log_grid(1e-8, 0.5, 200)).s.unwrap();
        let numeric = mtheta_numeric(&m, &theta, 40, &default_tau_grid()).sequence;
        assert!(growth_bound_constant(&m, &numeric, s, 40).is_some(), "({a},{b})");
        let (c, c2) = sandwich_constants(&m, &closed, &theta, &grid).expect("sandwich");
        assert!(c >= 2f64.powi(-10) && c2 <= 2f64.powi(10));
    }
}

#[test]
fn closed_form_composes() {
    for (a, b) in [(1.0, 0.0), (0.5, 2.0), (2.0, 1.0)] {
        for (s, u) in [(2.0, 1.5), (1.0, 3.0), (1.25, 2.0)] {
            let once = mtheta_closed(a, b, &AdmissibleFunction::power(s));
            let twice = mtheta_closed(once.0, once.1, &AdmissibleFunction::power(u));
            assert_eq!(twice, mtheta_closed(a, b, &AdmissibleFunction::power(s * u)));
        }
    }
}

proptest! {
    #[test]
    fn h_is_monotone_and_bounded(alpha in 0.0f64..3.0, beta in 0.0f64..3.0, t1 in 1e-6f64..2.0, t2 in 1e-6f64..2.0) {
        let m = TameSequence::gevrey_log(alpha, beta).unwrap();
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let a = h_eval(&m, lo, 200).ln_value;
        let b = h_eval(&m, hi, 200).ln_value;
        prop_assert!(a <= b + 1e-12);
        prop_assert!(b <= 0.0);
        if hi >= 1.0 {
            prop_assert_eq!(b, 0.0);
        }
        let ea = h_full(&m, lo).ln_value;
        let eb = h_full(&m, hi).ln_value;
        prop_assert!(ea <= eb + 1e-9 * (1.0 + eb.abs()));
        prop_assert!(ea <= a + 1e-9 * (1.0 + a.abs()));
    }

    #[test]
    fn closed_form_composition_is_exact(a in 0.0f64..3.0, b in 0.0f64..3.0, s in 1.0f64..3.0, u in 1.0f64..3.0) {
        let once = mtheta_closed(a, b, &AdmissibleFunction::power(s));
        let twice = mtheta_closed(once.0, once.1, &AdmissibleFunction::power(u));
        let direct = mtheta_closed(a, b, &AdmissibleFunction::power(s * u));
        prop_assert!((twice.0 - direct.0).abs() <= 1e-12 * (1.0 + direct.0));
        prop_assert!((twice.1 - direct.1).abs() <= 1e-12 * (1.0 + direct.1));
    }
}
