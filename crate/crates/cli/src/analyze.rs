use determinacy::algebra::{Polynomial, Rational, VarList};
use determinacy::carleman::{
    default_tau_grid, mtheta_closed_sequence, mtheta_numeric, AdmissibleFunction, TameSequence,
};
use determinacy::fitting::{check_k_psi_in_phi, kf_pipeline, primitive_member, FittingError, FittingResult, MapGerm};
use determinacy::groebner::{ideal_subset, Ideal, Membership};
use determinacy::lojasiewicz::{
    fit_separation, verify_separation, ExponentFit, LojaError, SamplePlan, SetDescriptor, VarietyDescriptor,
};

use crate::report::{
    DeterminacyReport, ExponentChoice, FitSummary, GSection, HypothesisCheck, KfSection, VerificationSummary,
};
use crate::spec::{describe_set, identity_germ, validate_sequence, GStrategy, ProblemSpec};
use crate::DeterminacyError;

/// Largest denominator tried by [`round_exponent`].
pub const MAX_DENOMINATOR: i64 = 12;
/// Rounding window of [`round_exponent`].
pub const ROUNDING_WINDOW: f64 = 0.05;
/// Wording used for sampled verification; sampling corroborates, it does not prove.
pub const SAMPLED: &str = "verified on samples";

/// Nearest rational `p/q` with `q ≤ 12` to `s_hat`, if within `0.05`; ties
/// go to the smaller denominator. Returned in lowest terms.
pub fn round_exponent(s_hat: f64) -> Option<(i64, i64)> {
    if !s_hat.is_finite() {
        return None;
    }
    let mut best: Option<(f64, i64, i64)> = None;
    for q in 1..=MAX_DENOMINATOR {
        let p = (s_hat * q as f64).round() as i64;
        let err = (p as f64 / q as f64 - s_hat).abs();
        if err <= ROUNDING_WINDOW && best.is_none_or(|(e, _, _)| err < e - 1e-15) {
            best = Some((err, p, q));
        }
    }
    best.map(|(_, p, q)| {
        let g = gcd(p.abs(), q);
        (p / g, q / g)
    })
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

/// Exponent of the target class for the quartic example's geometry:
/// `2α` for `0 < μ ≤ 1`, `2α/μ` for `1 < μ ≤ 2`, `α` for `μ > 2`.
pub fn beta_table_exact(alpha: &Rational, mu: &Rational) -> Result<Rational, DeterminacyError> {
    let zero = Rational::from_integer(0.into());
    if *alpha <= zero || *mu <= zero {
        return Err(DeterminacyError::Invalid("alpha and mu must be positive".into()));
    }
    let one = Rational::from_integer(1.into());
    let two = Rational::from_integer(2.into());
    Ok(if *mu <= one {
        &two * alpha
    } else if *mu <= two {
        &two * alpha / mu
    } else {
        alpha.clone()
    })
}

/// Floating-point form of [`beta_table_exact`].
pub fn beta_table(alpha: f64, mu: f64) -> Result<f64, DeterminacyError> {
    if !(alpha.is_finite() && mu.is_finite() && alpha > 0.0 && mu > 0.0) {
        return Err(DeterminacyError::Invalid("alpha and mu must be positive".into()));
    }
    Ok(if mu <= 1.0 {
        2.0 * alpha
    } else if mu <= 2.0 {
        2.0 * alpha / mu
    } else {
        alpha
    })
}

fn fitting_error(e: FittingError, checks: &[HypothesisCheck]) -> DeterminacyError {
    match e {
        FittingError::NotPrimitive { failure, remainder } => DeterminacyError::NotPrimitive {
            failure: failure.to_string(),
            remainder: remainder.to_string(),
            checks: checks.to_vec(),
        },
        FittingError::DegenerateIdeal => DeterminacyError::DegenerateIdeal { checks: checks.to_vec() },
        other => DeterminacyError::Fitting(other),
    }
}

fn strings(ps: &[Polynomial]) -> Vec<String> {
    ps.iter().map(|p| p.to_string()).collect()
}

/// Exact hypothesis checks of the pipeline up to `K_f`.
fn exact_stage(
    f: &Polynomial,
    psi: &MapGerm,
    checks: &mut Vec<HypothesisCheck>,
) -> Result<FittingResult, DeterminacyError> {
    checks.push(HypothesisCheck::new("f(0) = 0", true, "constant term vanishes"));
    let psi_ideal = psi.ideal();
    match primitive_member(f, &psi_ideal).map_err(|e| fitting_error(e, checks))? {
        Some((failure, remainder)) => {
            checks.push(HypothesisCheck::new(
                "f in the primitive ideal of <psi>",
                false,
                format!("{failure} has remainder {remainder}"),
            ));
            return Err(DeterminacyError::NotPrimitive {
                failure: failure.to_string(),
                remainder: remainder.to_string(),
                checks: checks.clone(),
            });
        }
        None => checks.push(HypothesisCheck::new(
            "f in the primitive ideal of <psi>",
            true,
            "f and every df/dxj reduce to 0 modulo <psi>",
        )),
    }
    let grad = MapGerm::gradient(f).map_err(|e| fitting_error(e, checks))?;
    let jac = match Ideal::new(grad.components().to_vec()) {
        Ok(j) => j,
        Err(e) => return Err(DeterminacyError::Fitting(e.into())),
    };
    let sub = ideal_subset(&jac, &psi_ideal).map_err(|e| DeterminacyError::Fitting(e.into()))?;
    checks.push(HypothesisCheck::new(
        "<grad f> inside <psi>",
        sub.is_none(),
        match &sub {
            None => "every partial derivative reduces to 0 modulo <psi>".to_string(),
            Some(w) => format!("df/dx{} has remainder {}", w.index + 1, w.remainder),
        },
    ));
    let result = kf_pipeline(psi, f).map_err(|e| {
        if matches!(e, FittingError::DegenerateIdeal) {
            checks.push(HypothesisCheck::new("K_f nonzero", false, "all maximal minors vanish"));
        }
        fitting_error(e, checks)
    })?;
    checks.push(HypothesisCheck::new("K_f nonzero", true, format!("{} nonzero maximal minors", result.minors.len())));
    let dol = check_k_psi_in_phi(&result, psi, &grad);
    checks.push(HypothesisCheck::new(
        "K_f·<psi> inside <grad f>",
        dol.is_none(),
        match dol {
            None => format!("all {} products minor·psi_i reduce to 0", result.minors.len() * psi.len()),
            Some((a, i)) => format!("m{}·psi_{} does not reduce to 0", a + 1, i + 1),
        },
    ));
    Ok(result)
}

/// Membership of `g` in `K_f` with a certificate checked by expansion.
fn certify(
    g: &Polynomial,
    result: &FittingResult,
    checks: &mut Vec<HypothesisCheck>,
) -> Result<Vec<String>, DeterminacyError> {
    match result.ideal.member(g) {
        Membership::Member(cert) => {
            let recombined = cert.cofactors.dot(&result.minors);
            let ok = &recombined == g;
            checks.push(HypothesisCheck::new(
                "g in K_f",
                ok,
                if ok { "cofactors over the minors recombine to g" } else { "certificate does not recombine" },
            ));
            if !ok {
                return Err(DeterminacyError::GNotInIdeal {
                    remainder: "certificate mismatch".into(),
                    checks: checks.clone(),
                });
            }
            Ok(strings(&cert.cofactors.entries))
        }
        Membership::NotMember { witness } => {
            checks.push(HypothesisCheck::new("g in K_f", false, format!("remainder {witness}")));
            Err(DeterminacyError::GNotInIdeal { remainder: witness.to_string(), checks: checks.clone() })
        }
    }
}

fn loja_error(e: LojaError, checks: &[HypothesisCheck]) -> DeterminacyError {
    match e {
        LojaError::InsufficientData { bins, needed } => {
            DeterminacyError::InsufficientData { bins, needed, checks: checks.to_vec() }
        }
        other => DeterminacyError::Loja(other),
    }
}

/// Outcome of fit, rounding, constant choice and fresh-sample verification.
struct Separation {
    fit: Option<FitSummary>,
    exponent: ExponentChoice,
    theta: AdmissibleFunction,
    verification: Option<VerificationSummary>,
}

/// `θ = c·t^s·ln(1+1/t)^{-ν}` with `s` the rounded exponent (at least 1) and
/// `c` half the smallest ratio `d / (r^s ln(1+1/r)^{-ν})` over the fit samples.
fn choose_theta(fit: &ExponentFit, warnings: &mut Vec<String>) -> (ExponentChoice, AdmissibleFunction) {
    let rounded = round_exponent(fit.s_hat);
    let (mut s, mut rational) = match rounded {
        Some((p, q)) => (p as f64 / q as f64, Some(if q == 1 { p.to_string() } else { format!("{p}/{q}") })),
        None => {
            warnings.push(format!("s_hat = {} has no rational within {ROUNDING_WINDOW}; kept as is", fit.s_hat));
            (fit.s_hat, None)
        }
    };
    if s < 1.0 {
        warnings.push(format!("exponent {s} raised to 1 for admissibility"));
        s = 1.0;
        rational = Some("1".into());
    }
    let nu = fit.nu_hat.unwrap_or(0.0).max(0.0);
    if fit.nu_hat.is_some_and(|v| v < 0.0) {
        warnings.push("negative nu_hat replaced by 0".into());
    }
    let probe = AdmissibleFunction { c: 1.0, mu: s, nu };
    let ln_min =
        fit.samples.iter().filter(|p| p.r < 1.0).map(|p| p.d.ln() - probe.ln_eval(p.r)).fold(f64::INFINITY, f64::min);
    let c = if ln_min.is_finite() { 0.5 * ln_min.exp() } else { 1.0 };
    (ExponentChoice { s, rational, s_hat: Some(fit.s_hat) }, AdmissibleFunction { c, mu: s, nu })
}

fn separation_stage(
    g: &Polynomial,
    y: &SetDescriptor,
    plan: &SamplePlan,
    checks: &mut Vec<HypothesisCheck>,
    warnings: &mut Vec<String>,
) -> Result<Separation, DeterminacyError> {
    let v = VarietyDescriptor::new(g.clone());
    if v.is_empty_set() {
        checks.push(HypothesisCheck::new("separation", true, "Z_g is empty, dist(x, Z_g) = +inf"));
        return Ok(Separation {
            fit: None,
            exponent: ExponentChoice { s: 1.0, rational: Some("1".into()), s_hat: None },
            theta: AdmissibleFunction::power(1.0),
            verification: None,
        });
    }
    let fit = fit_separation(&v, y, plan).map_err(|e| loja_error(e, checks))?;
    if fit.unconverged > 0 {
        warnings.push(format!("{} distance estimates did not converge", fit.unconverged));
    }
    let (exponent, theta) = choose_theta(&fit, warnings);
    let report = verify_separation(&v, y, &theta, &plan.fresh()).map_err(|e| loja_error(e, checks))?;
    let verification = VerificationSummary {
        ok: report.ok,
        checked: report.checked,
        violations: report.violations,
        worst_margin: report.worst_margin,
        worst_point: report.worst_point.clone(),
        wording: SAMPLED.into(),
    };
    checks.push(HypothesisCheck::new(
        "dist(x, Z_g) >= theta(dist(x, Y))",
        report.ok,
        format!("{SAMPLED}: {} fresh points, {} violations", report.checked, report.violations),
    ));
    if !report.ok {
        return Err(DeterminacyError::SeparationUnverified {
            worst_margin: report.worst_margin,
            worst_point: report.worst_point,
            checks: checks.clone(),
        });
    }
    let summary = FitSummary {
        s_hat: fit.s_hat,
        c_hat: fit.c_hat,
        nu_hat: fit.nu_hat,
        residual: fit.residual,
        bins: fit.bins,
        trimmed: fit.trimmed,
        samples: fit.samples.len(),
        unconverged: fit.unconverged,
    };
    Ok(Separation { fit: Some(summary), exponent, theta, verification: Some(verification) })
}

/// `M^(θ)`: closed form for Gevrey-log sequences, numeric supremum otherwise.
fn target_class(
    m: &TameSequence,
    theta: &AdmissibleFunction,
    warnings: &mut Vec<String>,
) -> Result<(TameSequence, String), DeterminacyError> {
    match m {
        TameSequence::GevreyLog { .. } => {
            let t = mtheta_closed_sequence(m, theta).map_err(DeterminacyError::Carleman)?;
            Ok((t, "closed form".into()))
        }
        TameSequence::Tabulated { log_values } => {
            let jmax = (log_values.len() - 1).min(60);
            let num = mtheta_numeric(m, theta, jmax, &default_tau_grid());
            warnings.extend(num.warnings);
            warnings.push("target computed numerically and defined up to equivalence".into());
            Ok((num.sequence, format!("numeric supremum over {} grid points", default_tau_grid().len())))
        }
    }
}

fn conclusion(target: &TameSequence, sampled: bool) -> String {
    let mut s = format!(
        "f + ∫<psi>·m^∞_{{Y,M}} ⊂ f ∘ R_{{M^(theta)}} with M^(theta) = {}",
        crate::report::describe_sequence(target)
    );
    if sampled {
        s.push_str("; the separation hypothesis is verified on samples, not proved");
    }
    s
}

fn pick_minor(minors: &[Polynomial]) -> Polynomial {
    let best = minors
        .iter()
        .enumerate()
        .min_by_key(|(i, m)| (m.total_degree(), *i))
        .map(|(_, m)| m.clone())
        .expect("K_f has a nonzero minor");
    best.monic()
}

/// Full pipeline: hypotheses, `K_f`, choice of `g`, separation fit and
/// verification, and the target class.
pub fn analyze(spec: &ProblemSpec) -> Result<DeterminacyReport, DeterminacyError> {
    validate_sequence(&spec.sequence)?;
    let mut checks = Vec::new();
    let mut warnings = Vec::new();
    let result = exact_stage(&spec.f, &spec.psi, &mut checks)?;
    let (g, certificate, separation) = match &spec.strategy {
        GStrategy::LowestDegreeMinor => {
            let g = pick_minor(&result.minors);
            let certificate = certify(&g, &result, &mut checks)?;
            (g.clone(), certificate, separation_stage(&g, &spec.y, &spec.plan, &mut checks, &mut warnings)?)
        }
        GStrategy::UserSupplied(g) => {
            if !same_ring(g.vars(), &spec.vars) {
                return Err(DeterminacyError::Invalid("g uses other variables".into()));
            }
            let certificate = certify(g, &result, &mut checks)?;
            (g.clone(), certificate, separation_stage(g, &spec.y, &spec.plan, &mut checks, &mut warnings)?)
        }
        GStrategy::AllMinorsBestFit => {
            let (g, sep) = best_minor(&result.minors, spec, &mut checks, &mut warnings)?;
            let certificate = certify(&g, &result, &mut checks)?;
            (g, certificate, sep)
        }
    };
    let (target, target_method) = target_class(&spec.sequence, &separation.theta, &mut warnings)?;
    let sampled = separation.verification.is_some();
    Ok(DeterminacyReport {
        variables: spec.vars.iter().cloned().collect(),
        f: spec.f.to_string(),
        psi: strings(spec.psi.components()),
        y: describe_set(&spec.y),
        sequence: spec.sequence.clone(),
        hypotheses: checks,
        kf: KfSection {
            minors: strings(&result.minors),
            basis: strings(result.ideal.basis()),
            unit_ideal: result.ideal.is_unit(),
        },
        g: GSection {
            strategy: spec.strategy.name().into(),
            g: g.to_string(),
            certificate,
            zero_set_empty: g.is_constant(),
        },
        fit: separation.fit,
        exponent: separation.exponent,
        theta: separation.theta,
        verification: separation.verification,
        conclusion: conclusion(&target, sampled),
        target,
        target_method,
        warnings,
    })
}

fn same_ring(a: &VarList, b: &VarList) -> bool {
    determinacy::algebra::same_vars(a, b)
}

/// Fits every distinct monic minor and keeps the smallest exponent.
fn best_minor(
    minors: &[Polynomial],
    spec: &ProblemSpec,
    checks: &mut Vec<HypothesisCheck>,
    warnings: &mut Vec<String>,
) -> Result<(Polynomial, Separation), DeterminacyError> {
    let mut distinct: Vec<Polynomial> = Vec::new();
    for m in minors {
        let m = m.monic();
        if !distinct.contains(&m) {
            distinct.push(m);
        }
    }
    distinct.sort_by_key(|m| m.total_degree());
    let mut best: Option<(Polynomial, Separation, Vec<HypothesisCheck>, Vec<String>)> = None;
    let mut last_err = None;
    for g in distinct {
        let mut c = checks.clone();
        let mut w = warnings.clone();
        match separation_stage(&g, &spec.y, &spec.plan, &mut c, &mut w) {
            Ok(sep) => {
                if best.as_ref().is_none_or(|b| sep.exponent.s < b.1.exponent.s) {
                    best = Some((g, sep, c, w));
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    match best {
        Some((g, sep, c, w)) => {
            *checks = c;
            *warnings = w;
            Ok((g, sep))
        }
        None => Err(last_err.expect("at least one minor")),
    }
}

/// Isolated-singularity specialization: `ψ` is the identity, `g = |x|^{2n}·γ`
/// for `γ ∈ <∇f>`, `Y = {0}` and the target is `M^s`.
pub fn isolated_pipeline(
    f: &Polynomial,
    m: &TameSequence,
    gamma: &Polynomial,
    plan: &SamplePlan,
) -> Result<DeterminacyReport, DeterminacyError> {
    validate_sequence(m)?;
    let vars = f.vars().clone();
    if !same_ring(gamma.vars(), &vars) {
        return Err(DeterminacyError::Invalid("gamma uses other variables".into()));
    }
    let n = vars.len();
    let mut checks = Vec::new();
    let mut warnings = Vec::new();
    let grad = MapGerm::gradient(f).map_err(|e| fitting_error(e, &checks))?;
    match grad.ideal().member(gamma) {
        Membership::Member(_) => checks.push(HypothesisCheck::new("gamma in <grad f>", true, "reduces to 0")),
        Membership::NotMember { witness } => {
            return Err(DeterminacyError::GammaNotInJacobian { remainder: witness.to_string() });
        }
    }
    let psi = identity_germ(&vars);
    let result = exact_stage(f, &psi, &mut checks)?;
    let mut specialization = true;
    for k in 0..n {
        let xk = Polynomial::var(&vars, k).expect("index in range").pow(n.saturating_sub(2) as u32);
        for d in grad.components() {
            specialization &= result.ideal.contains(&(&xk * d));
        }
    }
    checks.push(HypothesisCheck::new(
        "x_k^(n-2)·df/dx_j in K_f",
        specialization,
        format!("all {} products checked exactly", n * n),
    ));
    let mut norm2 = Polynomial::zero(&vars);
    for k in 0..n {
        let x = Polynomial::var(&vars, k).expect("index in range");
        norm2 = &norm2 + &(&x * &x);
    }
    let g = &norm2.pow(n as u32) * gamma;
    let certificate = certify(&g, &result, &mut checks)?;
    let y = SetDescriptor::origin();
    let mut separation = separation_stage(&g, &y, plan, &mut checks, &mut warnings)?;
    // M^s: the constant and log factor of θ do not change the class
    separation.theta = AdmissibleFunction { nu: 0.0, ..separation.theta };
    let (target, target_method) = target_class(m, &AdmissibleFunction::power(separation.exponent.s), &mut warnings)?;
    let sampled = separation.verification.is_some();
    Ok(DeterminacyReport {
        variables: vars.iter().cloned().collect(),
        f: f.to_string(),
        psi: strings(psi.components()),
        y: describe_set(&y),
        sequence: m.clone(),
        hypotheses: checks,
        kf: KfSection {
            minors: strings(&result.minors),
            basis: strings(result.ideal.basis()),
            unit_ideal: result.ideal.is_unit(),
        },
        g: GSection {
            strategy: "|x|^(2n)·gamma".into(),
            g: g.to_string(),
            certificate,
            zero_set_empty: g.is_constant(),
        },
        fit: separation.fit,
        exponent: separation.exponent,
        theta: separation.theta,
        verification: separation.verification,
        conclusion: conclusion(&target, sampled).replace("∫<psi>·m^∞_{Y,M}", "m^∞_M"),
        target,
        target_method,
        warnings,
    })
}
