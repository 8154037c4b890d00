use determinacy::algebra::{parse_poly, var_list, ComplexPoint, Polynomial};
use determinacy::carleman::AdmissibleFunction;
use determinacy::lojasiewicz::{
    dist_to_variety, fit_separation, verify_separation, Branch, BranchComponent, DistanceMethod, SamplePlan,
    SetDescriptor, VarietyDescriptor,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn poly(text: &str, names: &[&str]) -> Polynomial {
    parse_poly(text, &var_list(names)).unwrap()
}

/// `Z_g` for `g = x1² + x2⁴` (or any power of it): `z1 = ±i·z2²`.
fn quartic_branches() -> Vec<Branch> {
    let w = &["w"];
    [1, -1]
        .into_iter()
        .map(|sign| {
            Branch::new(vec![
                BranchComponent { re: poly("0", w), im: poly(&format!("{sign}*w^2"), w) },
                BranchComponent { re: poly("w", w), im: poly("0", w) },
            ])
            .unwrap()
        })
        .collect()
}

fn example_variety() -> VarietyDescriptor {
    VarietyDescriptor::new(poly("(x1^2+x2^4)^2", &["x1", "x2"])).with_branches(quartic_branches()).unwrap()
}

fn distance(x: &[f64], v: &VarietyDescriptor, method: DistanceMethod) -> f64 {
    dist_to_variety(&ComplexPoint::real(x).unwrap(), v, method).unwrap().distance
}

const METHODS: [DistanceMethod; 3] = [
    DistanceMethod::Penalty { starts: 3, seed: 0 },
    DistanceMethod::Parametrized,
    DistanceMethod::Grid { per_axis: 9 },
];

#[test]
fn distance_examples() {
    let v = VarietyDescriptor::new(poly("x1^2+x2^4", &["x1", "x2"])).with_branches(quartic_branches()).unwrap();
    for m in METHODS {
        assert_eq!(distance(&[0.0, 0.0], &v, m), 0.0);
        let d = distance(&[0.1, 0.0], &v, m);
        assert!((d - 0.1).abs() < 1e-6, "{m:?}: {d}");
        let d = distance(&[0.0, 0.1], &v, m);
        assert!((d / 0.01 - 1.0).abs() < 0.02, "{m:?}: {d}");
    }
}

#[test]
fn rejects_complex_points_and_wrong_dimension() {
    let v = example_variety();
    let z = ComplexPoint::new(vec![Complex64::new(0.1, 0.1), Complex64::new(0.0, 0.0)]).unwrap();
    assert!(dist_to_variety(&z, &v, DistanceMethod::default()).is_err());
    let z = ComplexPoint::real(&[0.1]).unwrap();
    assert!(dist_to_variety(&z, &v, DistanceMethod::default()).is_err());
    let bare = VarietyDescriptor::new(poly("x1", &["x1", "x2"]));
    assert!(dist_to_variety(&ComplexPoint::real(&[0.1, 0.0]).unwrap(), &bare, DistanceMethod::Parametrized).is_err());
}

#[test]
fn empty_variety_is_infinitely_far() {
    let v = VarietyDescriptor::new(poly("3", &["x1", "x2"]));
    assert!(distance(&[0.1, 0.2], &v, DistanceMethod::default()).is_infinite());
}

#[test]
fn branches_off_the_variety_are_rejected() {
    let w = &["w"];
    let bad = Branch::new(vec![
        BranchComponent { re: poly("w", w), im: poly("0", w) },
        BranchComponent { re: poly("w", w), im: poly("0", w) },
    ])
    .unwrap();
    assert!(VarietyDescriptor::new(poly("x1^2+x2^4", &["x1", "x2"])).with_branches(vec![bad]).is_err());
}

#[test]
fn witness_upper_bound() {
    let v = example_variety();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..40 {
        let x = [rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3)];
        let d = distance(&x, &v, DistanceMethod::default());
        for b in v.branches() {
            for _ in 0..5 {
                let w = Complex64::new(rng.random_range(-0.6..0.6), rng.random_range(-0.6..0.6));
                let z = b.eval(&[w]);
                let dz = z.iter().zip(&x).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
                assert!(d <= dz + 1e-9, "x={x:?} d={d} witness={dz}");
            }
        }
    }
}

#[test]
fn penalty_and_parametrized_agree() {
    let v = example_variety();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    while checked < 100 {
        let x = [rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3)];
        if x[0] * x[0] + x[1] * x[1] > 0.09 {
            continue;
        }
        checked += 1;
        let a = distance(&x, &v, DistanceMethod::Penalty { starts: 3, seed: checked });
        let b = distance(&x, &v, DistanceMethod::Parametrized);
        assert!((a - b).abs() <= 0.05 * a.max(b), "x={x:?} penalty={a} parametrized={b}");
    }
}

#[test]
fn zero_detection() {
    let cases =
        [("x1*x2", [0.3, 0.0]), ("x1^2-x2^3", [0.0, 0.0]), ("x1^2-x2^2", [0.2, -0.2]), ("(x1^2+x2^4)^2", [0.0, 0.0])];
    for (g, x) in cases {
        let v = VarietyDescriptor::new(poly(g, &["x1", "x2"]));
        assert!(distance(&x, &v, DistanceMethod::default()) <= 1e-8, "{g}");
    }
}

#[test]
fn real_curve_distance_matches_geometry() {
    // circle of radius 1/2: distance from (0.1, 0) is at most 0.4 (real point)
    let v = VarietyDescriptor::new(poly("x1^2+x2^2-1/4", &["x1", "x2"]));
    let d = distance(&[0.1, 0.0], &v, DistanceMethod::default());
    assert!(d <= 0.4 + 1e-12 && d > 0.0);
    let g = distance(&[0.1, 0.0], &v, DistanceMethod::Grid { per_axis: 9 });
    assert!((d - g).abs() < 1e-6 * d.max(g) || d < g);
}

#[test]
fn example_exponent_three_halves() {
    let fit = fit_separation(&example_variety(), &SetDescriptor::power_curve(1.5), &SamplePlan::default()).unwrap();
    assert!((fit.s_hat - 4.0 / 3.0).abs() < 0.1, "{}", fit.s_hat);
    assert!(fit.samples.iter().all(|s| s.r > 0.0 && s.d > 0.0));
    let csv = fit.to_csv();
    assert!(csv.starts_with("log_r,log_d,is_envelope\n"));
    assert_eq!(csv.lines().count(), fit.samples.len() + 1);
}

#[test]
fn example_exponent_three() {
    let fit = fit_separation(&example_variety(), &SetDescriptor::power_curve(3.0), &SamplePlan::default()).unwrap();
    assert!((fit.s_hat - 1.0).abs() < 0.1, "{}", fit.s_hat);
}

#[test]
fn exponent_is_scale_free() {
    let v = example_variety();
    let y = SetDescriptor::power_curve(1.5);
    let base = SamplePlan::default();
    let doubled = SamplePlan { radii: base.radii.iter().map(|r| 2.0 * r).collect(), ..base.clone() };
    let a = fit_separation(&v, &y, &base).unwrap();
    let b = fit_separation(&v, &y, &doubled).unwrap();
    assert!((a.s_hat - b.s_hat).abs() < 0.05, "{} vs {}", a.s_hat, b.s_hat);
}

#[test]
fn fitted_bound_holds_on_fresh_samples_and_a_stronger_one_fails() {
    let v = example_variety();
    let y = SetDescriptor::power_curve(1.5);
    let plan = SamplePlan::default();
    let fit = fit_separation(&v, &y, &plan).unwrap();
    let c = 0.5 * fit.min_ratio(4.0 / 3.0);
    let fresh = plan.fresh();
    let report = verify_separation(&v, &y, &AdmissibleFunction::new(c, 4.0 / 3.0, 0.0).unwrap(), &fresh).unwrap();
    assert!(report.ok, "{report:?}");
    assert!(report.worst_margin > 0.0);

    let strong = verify_separation(&v, &y, &AdmissibleFunction::new(c, 1.0, 0.0).unwrap(), &fresh).unwrap();
    assert!(!strong.ok);
    // the worst point lies on the x2-axis
    assert!(strong.worst_point[0].abs() < 1e-12 * strong.worst_point[1].abs());
}

#[test]
fn trivial_real_case() {
    let v = VarietyDescriptor::new(poly("x1^2+x2^2", &["x1", "x2"]));
    let plan = SamplePlan {
        radii: determinacy::lojasiewicz::geometric_radii(-2.0, -10.0, 1),
        directions: 16,
        ..SamplePlan::default()
    };
    let theta = AdmissibleFunction::new(0.5, 1.0, 0.0).unwrap();
    let report = verify_separation(&v, &SetDescriptor::origin(), &theta, &plan).unwrap();
    assert!(report.ok, "{report:?}");
}
