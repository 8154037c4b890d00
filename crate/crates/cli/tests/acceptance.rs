use std::path::PathBuf;
use std::time::{Duration, Instant};

use determinacy::algebra::{parse_poly, rational_to_f64, var_list, Monomial, Polynomial, Rational, VarList};
use determinacy::carleman::{
    check_nonqa, default_tau_grid, h_full, log_grid, mtheta_closed, mtheta_closed_sequence, mtheta_numeric,
    sandwich_constants, AdmissibleFunction, TameSequence,
};
use determinacy::fitting::{fitting_from_parts, kf_pipeline, primitive_member, MapGerm};
use determinacy::groebner::{ideal_equal, Ideal, ModuleVector};
use determinacy::lojasiewicz::{
    fit_pairs, fit_separation, geometric_radii, SamplePlan, SetDescriptor, VarietyDescriptor,
};
use determinacy_cli::{analyze, beta_table_exact, round_exponent, ProblemConfig, ProblemSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Outcome);

fn germ(v: &VarList, texts: &[&str]) -> MapGerm {
    MapGerm::new(texts.iter().map(|t| parse_poly(t, v).unwrap()).collect()).unwrap()
}

fn q(p: i64, d: i64) -> Rational {
    Rational::new(p.into(), d.into())
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn quartic() -> (VarList, MapGerm, Polynomial) {
    let v = var_list(&["x1", "x2"]);
    let psi = germ(&v, &["x1", "x2"]);
    let f = parse_poly("(x1^2+x2^4)^2", &v).unwrap();
    (v, psi, f)
}

fn cone() -> (VarList, MapGerm, Polynomial) {
    let v = var_list(&["x1", "x2", "x3"]);
    let psi = germ(&v, &["x1", "x2"]);
    let f = parse_poly("(x1^2+x2^2+x3^4)^2*(x1^2+x2^2)", &v).unwrap();
    (v, psi, f)
}

fn fitting_ideal_reproduction() -> Outcome {
    let (v, psi, f) = quartic();
    let r = kf_pipeline(&psi, &f).map_err(|e| e.to_string())?;
    let expected =
        Ideal::new(vec![parse_poly("x1*(x1^2+x2^4)", &v).unwrap(), parse_poly("x2^3*(x1^2+x2^4)", &v).unwrap()])
            .unwrap();
    ensure(ideal_equal(&r.ideal, &expected).unwrap(), "K_f differs")?;
    Ok(format!("K_f = <{}>", r.ideal.basis().iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")))
}

fn membership_reproduction() -> Outcome {
    let (v, psi, f) = cone();
    let r = kf_pipeline(&psi, &f).map_err(|e| e.to_string())?;
    let g = parse_poly("(x1^2+x2^2+x3^4)^2*(3*x1^2+3*x2^2+x3^4)^2", &v).unwrap();
    ensure(r.ideal.normal_form(&g).is_zero(), "g has a nonzero normal form")?;
    let ideal = psi.ideal();
    for t in ["x1^2", "x1*x2", "x2^2"] {
        let p = parse_poly(t, &v).unwrap();
        ensure(primitive_member(&p, &ideal).unwrap().is_none(), format!("{t} should be primitive"))?;
    }
    for t in ["x1", "x2"] {
        let p = parse_poly(t, &v).unwrap();
        ensure(primitive_member(&p, &ideal).unwrap().is_some(), format!("{t} should not be primitive"))?;
    }
    Ok("normal form of g is 0; primitive ideal is <x1^2, x1*x2, x2^2>".into())
}

fn property_suite() -> Outcome {
    let mut count = 0;
    for (_, psi, f) in [quartic(), cone()] {
        let r = kf_pipeline(&psi, &f).map_err(|e| e.to_string())?;
        let jacobian = MapGerm::gradient(&f).unwrap().ideal();
        for m in &r.minors {
            for p in psi.components() {
                ensure(jacobian.contains(&(m * p)), format!("{m} * {p} outside <grad f>"))?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} products minor·psi_i in <grad f>"))
}

fn random_poly(v: &VarList, rng: &mut ChaCha8Rng) -> Polynomial {
    let mut p = Polynomial::zero(v);
    for _ in 0..rng.random_range(1..4) {
        let exps: Vec<u32> = (0..v.len()).map(|_| rng.random_range(0..3)).collect();
        let c = rng.random_range(-5i64..=5);
        p.add_term(Monomial::from_exponents(exps), q(c, 1));
    }
    p
}

fn lift_independence() -> Outcome {
    let (v, psi, f) = quartic();
    let phi = MapGerm::gradient(&f).unwrap();
    let base = kf_pipeline(&psi, &f).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..5 {
        let lifts: Vec<ModuleVector> = base
            .lifts
            .iter()
            .map(|h| base.relations.iter().fold(h.clone(), |acc, k| acc.add(&k.scale_by(&random_poly(&v, &mut rng)))))
            .collect();
        let other = fitting_from_parts(&psi, &phi, lifts, base.relations.clone()).map_err(|e| e.to_string())?;
        ensure(ideal_equal(&base.ideal, &other.ideal).unwrap(), format!("trial {trial} changed K_f"))?;
    }
    Ok("5 perturbed lift sets give the same ideal".into())
}

fn exponent_table() -> Outcome {
    let (_, _, f) = quartic();
    let v = VarietyDescriptor::new(f);
    let plan = SamplePlan::default();
    let cases = [((1, 2), q(2, 1)), ((1, 1), q(2, 1)), ((3, 2), q(4, 3)), ((2, 1), q(1, 1)), ((3, 1), q(1, 1))];
    let mut lines = Vec::new();
    for ((mn, md), expected) in cases {
        let mu = q(mn, md);
        let fit =
            fit_separation(&v, &SetDescriptor::power_curve(mn as f64 / md as f64), &plan).map_err(|e| e.to_string())?;
        let target = mn as f64 / md as f64;
        let exp_f = rational_to_f64(&expected);
        ensure((fit.s_hat - exp_f).abs() <= 0.1, format!("mu = {target}: s_hat = {}", fit.s_hat))?;
        let (p, d) = round_exponent(fit.s_hat).ok_or("no rational")?;
        for alpha in [q(1, 1), q(1, 2), q(3, 2)] {
            let lhs = &alpha * &q(p, d);
            ensure(lhs == beta_table_exact(&alpha, &mu).unwrap(), format!("mu = {target}, alpha = {alpha}"))?;
        }
        lines.push(format!("mu={target}: s_hat={:.4} -> {p}/{d}", fit.s_hat));
    }
    Ok(lines.join("; "))
}

fn ln_factorial(j: usize) -> f64 {
    (1..=j).map(|k| (k as f64).ln()).sum()
}

fn sequence_calculus() -> Outcome {
    for (a, s, c) in [(1.0, 2.0, 1.0), (0.5, 1.5, 3.0), (2.0, 4.0 / 3.0, 0.25)] {
        let theta = AdmissibleFunction::new(c, s, 0.0).unwrap();
        ensure(mtheta_closed(a, 0.0, &theta) == (a * s, 0.0), "power rule")?;
    }
    for (a, b, mu, nu) in [(1.0, 1.0, 1.5, 1.0), (0.5, 0.0, 2.0, 0.5), (2.0, 3.0, 1.25, 2.0)] {
        let theta = AdmissibleFunction::new(1.0, mu, nu).unwrap();
        ensure(mtheta_closed(a, b, &theta) == (a * mu, b * mu + nu), "log rule")?;
    }
    let m = TameSequence::gevrey_log(1.3, 0.7).unwrap();
    ensure(mtheta_closed_sequence(&m, &AdmissibleFunction::power(1.0)).unwrap() == m, "identity")?;
    let pairs = [
        (TameSequence::gevrey_log(1.0, 0.0).unwrap(), AdmissibleFunction::power(2.0)),
        (TameSequence::gevrey_log(1.0, 1.0).unwrap(), AdmissibleFunction::new(1.0, 1.5, 1.0).unwrap()),
    ];
    let mut worst: f64 = 1.0;
    for (m, theta) in pairs {
        let closed = mtheta_closed_sequence(&m, &theta).unwrap();
        let numeric = mtheta_numeric(&m, &theta, 30, &default_tau_grid()).sequence;
        for j in 1..=30 {
            let band = ((numeric.ln_m(j).unwrap() - closed.ln_m(j).unwrap()) / j as f64).exp();
            ensure((0.25..=4.0).contains(&band), format!("j = {j}: ratio^(1/j) = {band}"))?;
            worst = worst.max(band.max(1.0 / band));
        }
    }
    let closed =
        mtheta_closed_sequence(&TameSequence::gevrey_log(1.0, 0.0).unwrap(), &AdmissibleFunction::power(2.0)).unwrap();
    for j in 0..=30 {
        ensure((closed.ln_m(j).unwrap() - 2.0 * ln_factorial(j)).abs() < 1e-9 * (1.0 + ln_factorial(j)), "j!^2")?;
    }
    Ok(format!("closed forms exact; numeric band within factor {worst:.3}"))
}

fn sandwich() -> Outcome {
    let m = TameSequence::gevrey_log(1.0, 0.0).unwrap();
    let theta = AdmissibleFunction::power(2.0);
    let m_theta = mtheta_closed_sequence(&m, &theta).unwrap();
    let grid = log_grid(1e-6, 1e-1, 512);
    let (c, c2) = sandwich_constants(&m, &m_theta, &theta, &grid).ok_or("no grid constants")?;
    let lim = 2f64.powi(10);
    ensure(c >= 1.0 / lim && c2 <= lim, format!("constants {c}, {c2} out of range"))?;
    for &t in &grid {
        let mid = h_full(&m_theta, theta.eval(t)).ln_value;
        let tol = 1e-9 * (1.0 + mid.abs());
        ensure(h_full(&m, c * t).ln_value <= mid + tol, format!("lower bound fails at {t}"))?;
        ensure(mid <= h_full(&m, c2 * t).ln_value + tol, format!("upper bound fails at {t}"))?;
    }
    Ok(format!("c = {c}, c' = {c2} on 512 points"))
}

fn non_quasianalyticity() -> Outcome {
    let r = check_nonqa(&TameSequence::gevrey_log(1.0, 0.0).unwrap(), 10_000);
    let bound: f64 = std::f64::consts::PI.powi(2) / 6.0;
    ensure(r.partial_sums.len() >= 10_000, "too few terms")?;
    ensure(r.partial_sums.iter().all(|s| *s <= bound + 1e-12), "partial sums exceed the bound")?;
    for (j, w) in r.partial_sums.windows(2).enumerate() {
        let term = w[1] - w[0];
        let exact = 1.0 / ((j + 2) as f64).powi(2);
        ensure((term - exact).abs() <= 1e-12 * exact.max(1e-300) + 1e-15, format!("term {}", j + 1))?;
    }
    // sum over j ≥ 1 of 1/(j+1)^2 plus the first term 1/(0+1)^2
    let limit = (bound - 1.0) + 1.0;
    let last = *r.partial_sums.last().unwrap();
    ensure((last - limit).abs() <= 1e-3, format!("partial sum {last}"))?;
    let q = check_nonqa(&TameSequence::gevrey_log(0.0, 0.0).unwrap(), 1_000);
    let at = q.partial_sums[999];
    ensure(at > 5.0, format!("partial sum at 10^3 is {at}"))?;
    Ok(format!("GevreyLog(1,0): {last:.6} vs {limit:.6}; GevreyLog(0,0): {at:.3} at jmax = 1000"))
}

fn synthetic_recovery() -> Outcome {
    let radii = geometric_radii(-4.0, -18.0, 4);
    for s in [1.0, 1.5, 2.0] {
        let pairs: Vec<(f64, f64)> = radii.iter().map(|&r| (r, r.powf(s))).collect();
        let fit = fit_pairs(&pairs, false, None, 0).map_err(|e| e.to_string())?;
        ensure((fit.s_hat - s).abs() <= 1e-6, format!("s = {s}: s_hat = {}", fit.s_hat))?;
    }
    Ok("s in {1, 1.5, 2} recovered to 1e-6".into())
}

fn example(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

fn golden_reports() -> Outcome {
    for name in ["example25", "example26"] {
        let cfg = ProblemConfig::load(&example(&format!("{name}.json"))).map_err(|e| e.to_string())?;
        let report = analyze(&ProblemSpec::from_config(&cfg).unwrap()).map_err(|e| e.to_string())?;
        for (ext, body) in [("txt", report.to_text()), ("json", report.to_json())] {
            let stored =
                std::fs::read_to_string(example(&format!("{name}.report.{ext}"))).map_err(|e| e.to_string())?;
            ensure(stored == body, format!("{name}.report.{ext} differs"))?;
        }
    }
    Ok("both reports byte-identical to the stored ones".into())
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("fitting ideal of the quartic example", 5, fitting_ideal_reproduction),
        ("membership in the cone example", 30, membership_reproduction),
        ("minor·psi_i in the Jacobian ideal", 60, property_suite),
        ("independence from the choice of lifts", 60, lift_independence),
        ("exponent table", 120, exponent_table),
        ("sequence calculus", 30, sequence_calculus),
        ("sandwich property", 60, sandwich),
        ("non-quasianalyticity", 60, non_quasianalyticity),
        ("synthetic exponent recovery", 5, synthetic_recovery),
        ("golden reports", 600, golden_reports),
    ];
    let mut failed = Vec::new();
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*budget);
        let (status, detail) = match (&outcome, in_time) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("{d}; over the {budget} s budget")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        println!("criterion {:>2} {status} [{:.2} s] {name}: {detail}", i + 1, elapsed.as_secs_f64());
        if status == "FAIL" {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
