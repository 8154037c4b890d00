use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use determinacy::carleman::{
    check_admissible, check_nonqa, check_tame, compare_sequences, default_grid, default_tau_grid,
    mtheta_closed_sequence, mtheta_numeric, AdmissibleFunction, NonQaVerdict, TameSequence,
};
use determinacy::fitting::{kf_pipeline, primitive_member, FittingError};
use determinacy::lojasiewicz::{fit_separation, VarietyDescriptor};
use serde::Serialize;

use crate::report::{describe_sequence, describe_theta, num};
use crate::spec::{GStrategy, ProblemConfig, ProblemSpec};
use crate::{analyze, beta_table, DeterminacyError};

#[derive(Parser, Debug)]
#[command(
    name = "determinacy",
    version,
    about = "Determinacy of polynomial germs under flat Denjoy-Carleman perturbations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Problem description (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tameness of the weight sequence.
    CheckTame {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 200)]
        jmax: usize,
    },
    /// Non-quasianalyticity of the weight sequence.
    CheckNonqa {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10_000)]
        jmax: usize,
    },
    /// The sequence attached to (M, theta): closed form and numeric check.
    Htheta {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 30)]
        jmax: usize,
    },
    /// Lifts, relations, the matrix lambda and K_f.
    Fitting {
        #[command(flatten)]
        common: Common,
    },
    /// Membership of f in the primitive ideal of <psi>.
    PrimitiveCheck {
        #[command(flatten)]
        common: Common,
    },
    /// Separation exponent fit for the chosen g.
    LojaFit {
        #[command(flatten)]
        common: Common,
        /// Dump samples as CSV (log_r,log_d,is_envelope).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Full pipeline report.
    Analyze {
        #[command(flatten)]
        common: Common,
    },
    /// Closed-form exponent table for the quartic example.
    BetaTable {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Exit status: success.
const OK: i32 = 0;
/// Exit status: usage, input or i/o error.
const USAGE: i32 = 1;
/// Exit status: a hypothesis failed; the report is still emitted.
const HYPOTHESIS: i32 = 2;

struct Output {
    text: String,
    json: String,
    code: i32,
}

impl Output {
    fn new<T: Serialize>(text: String, value: &T, code: i32) -> Self {
        let json = serde_json::to_string_pretty(value).expect("serializable") + "\n";
        Output { text, json, code }
    }
}

/// Runs the command line and returns the exit status; reports go to stdout.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    run_with(argv, &mut lock)
}

/// [`run`] with an explicit sink for the report.
pub fn run_with<I, T>(argv: I, sink: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { OK };
            let _ = e.print();
            return code;
        }
    };
    let (json, out) = match &cli.command {
        Command::BetaTable { json, out, .. } => (*json, out.clone()),
        Command::CheckTame { common, .. }
        | Command::CheckNonqa { common, .. }
        | Command::Htheta { common, .. }
        | Command::Fitting { common }
        | Command::PrimitiveCheck { common }
        | Command::LojaFit { common, .. }
        | Command::Analyze { common } => (common.json, common.out.clone()),
    };
    let output = match dispatch(&cli.command) {
        Ok(o) => o,
        Err(e) if e.is_hypothesis_failure() => failure_output(&e),
        Err(e) => {
            eprintln!("error: {e}");
            return USAGE;
        }
    };
    let body = if json { &output.json } else { &output.text };
    let written = match out {
        Some(path) => std::fs::write(&path, body).map_err(|e| format!("{}: {e}", path.display())),
        None => sink.write_all(body.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return USAGE;
    }
    output.code
}

#[derive(Serialize)]
struct FailureReport<'a> {
    status: &'static str,
    error: String,
    checks: &'a [crate::HypothesisCheck],
}

fn failure_output(e: &DeterminacyError) -> Output {
    let mut text = String::from("hypothesis failure\n");
    for h in e.checks() {
        text.push_str(&format!("  [{}] {}: {}\n", if h.passed { "pass" } else { "FAIL" }, h.name, h.detail));
    }
    text.push_str(&format!("error: {e}\n"));
    Output::new(
        text,
        &FailureReport { status: "hypothesis_failed", error: e.to_string(), checks: e.checks() },
        HYPOTHESIS,
    )
}

fn load(common: &Common) -> Result<ProblemConfig, DeterminacyError> {
    let path = common.config.as_deref().ok_or_else(|| DeterminacyError::Invalid("--config is required".into()))?;
    ProblemConfig::load(path)
}

fn sequence_of(cfg: &ProblemConfig) -> Result<TameSequence, DeterminacyError> {
    let m = cfg.sequence.clone().ok_or_else(|| DeterminacyError::Invalid("config has no sequence".into()))?;
    crate::spec::validate_sequence(&m)?;
    Ok(m)
}

fn dispatch(cmd: &Command) -> Result<Output, DeterminacyError> {
    match cmd {
        Command::BetaTable { alpha, mu, .. } => {
            let b = beta_table(*alpha, *mu)?;
            #[derive(Serialize)]
            struct Beta {
                alpha: f64,
                mu: f64,
                beta: f64,
            }
            Ok(Output::new(format!("{}\n", num(b)), &Beta { alpha: *alpha, mu: *mu, beta: b }, OK))
        }
        Command::CheckTame { common, jmax } => {
            let m = sequence_of(&load(common)?)?;
            let r = check_tame(&m, *jmax);
            let text = match &r.first_violation {
                None => format!(
                    "{}: tame up to j = {} (moderate growth constant {})\n",
                    describe_sequence(&m),
                    r.checked_up_to,
                    r.moderate_growth.map_or("n/a".into(), num)
                ),
                Some(v) => format!("{}: not tame, {v:?}\n", describe_sequence(&m)),
            };
            Ok(Output::new(text, &r, if r.ok { OK } else { HYPOTHESIS }))
        }
        Command::CheckNonqa { common, jmax } => {
            let m = sequence_of(&load(common)?)?;
            let r = check_nonqa(&m, *jmax);
            let last = r.partial_sums.last().copied().unwrap_or(0.0);
            let verdict = match r.verdict {
                NonQaVerdict::NonQuasianalytic => "non-quasianalytic",
                NonQaVerdict::Quasianalytic => "quasianalytic",
            };
            let text = format!(
                "{}: {verdict}{}; partial sum over {} terms = {}\n",
                describe_sequence(&m),
                if r.heuristic { " (heuristic)" } else { "" },
                r.partial_sums.len(),
                num(last)
            );
            #[derive(Serialize)]
            struct NonQa {
                verdict: NonQaVerdict,
                heuristic: bool,
                terms: usize,
                partial_sum: f64,
            }
            let code = if r.verdict == NonQaVerdict::NonQuasianalytic { OK } else { HYPOTHESIS };
            Ok(Output::new(
                text,
                &NonQa { verdict: r.verdict, heuristic: r.heuristic, terms: r.partial_sums.len(), partial_sum: last },
                code,
            ))
        }
        Command::Htheta { common, jmax } => htheta(&load(common)?, *jmax),
        Command::Fitting { common } => fitting(&ProblemSpec::from_config(&load(common)?)?),
        Command::PrimitiveCheck { common } => primitive(&ProblemSpec::from_config(&load(common)?)?),
        Command::LojaFit { common, csv } => loja_fit(&ProblemSpec::from_config(&load(common)?)?, csv.as_deref()),
        Command::Analyze { common } => {
            let report = analyze(&ProblemSpec::from_config(&load(common)?)?)?;
            Ok(Output { text: report.to_text(), json: report.to_json(), code: OK })
        }
    }
}

fn htheta(cfg: &ProblemConfig, jmax: usize) -> Result<Output, DeterminacyError> {
    let m = sequence_of(cfg)?;
    let theta = cfg.theta.ok_or_else(|| DeterminacyError::Invalid("config has no theta".into()))?;
    let theta = AdmissibleFunction::new(theta.c, theta.mu, theta.nu)?;
    let adm = check_admissible(&theta, &default_grid());
    let numeric = mtheta_numeric(&m, &theta, jmax, &default_tau_grid());
    let closed = mtheta_closed_sequence(&m, &theta).ok();
    let comparison = closed.as_ref().map(|c| compare_sequences(&numeric.sequence, c, jmax));
    let mut text = format!("M = {}\ntheta(t) = {}\n", describe_sequence(&m), describe_theta(&theta));
    text.push_str(&format!("admissible: {} (s = {})\n", adm.ok, adm.s.map_or("n/a".into(), num)));
    if let Some(c) = &closed {
        text.push_str(&format!("M^(theta) closed form: {}\n", describe_sequence(c)));
    }
    if let Some(cmp) = &comparison {
        text.push_str(&format!("numeric vs closed form: {:?}, sup ratio^(1/j) = {}\n", cmp.verdict, num(cmp.sup)));
    }
    if let TameSequence::Tabulated { log_values } = &numeric.sequence {
        text.push_str("j  ln M^(theta)_j (numeric)\n");
        for (j, v) in log_values.iter().enumerate() {
            text.push_str(&format!("{j}  {}\n", num(*v)));
        }
    }
    for w in &numeric.warnings {
        text.push_str(&format!("warning: {w}\n"));
    }
    #[derive(Serialize)]
    struct Htheta<'a> {
        admissible: &'a determinacy::carleman::AdmissibleReport,
        closed: Option<&'a TameSequence>,
        numeric: &'a determinacy::carleman::MthetaNumeric,
        comparison: Option<&'a determinacy::carleman::Comparison>,
    }
    let value =
        Htheta { admissible: &adm, closed: closed.as_ref(), numeric: &numeric, comparison: comparison.as_ref() };
    Ok(Output::new(text, &value, if adm.ok { OK } else { HYPOTHESIS }))
}

fn fitting(spec: &ProblemSpec) -> Result<Output, DeterminacyError> {
    let result = kf_pipeline(&spec.psi, &spec.f).map_err(|e| match e {
        FittingError::NotPrimitive { failure, remainder } => DeterminacyError::NotPrimitive {
            failure: failure.to_string(),
            remainder: remainder.to_string(),
            checks: Vec::new(),
        },
        FittingError::DegenerateIdeal => DeterminacyError::DegenerateIdeal { checks: Vec::new() },
        other => DeterminacyError::Fitting(other),
    })?;
    let vec_str = |v: &determinacy::groebner::ModuleVector| {
        format!("({})", v.entries.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", "))
    };
    #[derive(Serialize)]
    struct FittingOut {
        lifts: Vec<String>,
        relations: Vec<String>,
        minors: Vec<String>,
        basis: Vec<String>,
    }
    let value = FittingOut {
        lifts: result.lifts.iter().map(vec_str).collect(),
        relations: result.relations.iter().map(vec_str).collect(),
        minors: result.minors.iter().map(|p| p.to_string()).collect(),
        basis: result.ideal.basis().iter().map(|p| p.to_string()).collect(),
    };
    let mut text = String::new();
    for (title, items) in [
        ("lifts", &value.lifts),
        ("relations", &value.relations),
        ("minors", &value.minors),
        ("K_f basis", &value.basis),
    ] {
        text.push_str(&format!("{title} ({})\n", items.len()));
        for i in items {
            text.push_str(&format!("  {i}\n"));
        }
    }
    Ok(Output::new(text, &value, OK))
}

fn primitive(spec: &ProblemSpec) -> Result<Output, DeterminacyError> {
    let found = primitive_member(&spec.f, &spec.psi.ideal())?;
    #[derive(Serialize)]
    struct Primitive {
        primitive: bool,
        failure: Option<String>,
        remainder: Option<String>,
    }
    let value = Primitive {
        primitive: found.is_none(),
        failure: found.as_ref().map(|(f, _)| f.to_string()),
        remainder: found.as_ref().map(|(_, r)| r.to_string()),
    };
    let text = match &found {
        None => "f is in the primitive ideal of <psi>\n".to_string(),
        Some((f, r)) => format!("f is not in the primitive ideal of <psi>: witness {f} with remainder {r}\n"),
    };
    Ok(Output::new(text, &value, if found.is_none() { OK } else { HYPOTHESIS }))
}

fn loja_fit(spec: &ProblemSpec, csv: Option<&Path>) -> Result<Output, DeterminacyError> {
    let g = match &spec.strategy {
        GStrategy::UserSupplied(g) => g.clone(),
        _ => {
            let result = kf_pipeline(&spec.psi, &spec.f)?;
            result
                .minors
                .iter()
                .enumerate()
                .min_by_key(|(i, m)| (m.total_degree(), *i))
                .map(|(_, m)| m.monic())
                .ok_or(DeterminacyError::DegenerateIdeal { checks: Vec::new() })?
        }
    };
    let v = VarietyDescriptor::new(g.clone());
    if v.is_empty_set() {
        return Err(DeterminacyError::Invalid("Z_g is empty; there is nothing to fit".into()));
    }
    let fit = fit_separation(&v, &spec.y, &spec.plan).map_err(|e| match e {
        determinacy::lojasiewicz::LojaError::InsufficientData { bins, needed } => {
            DeterminacyError::InsufficientData { bins, needed, checks: Vec::new() }
        }
        other => DeterminacyError::Loja(other),
    })?;
    if let Some(path) = csv {
        std::fs::write(path, fit.to_csv()).map_err(|e| DeterminacyError::Io(format!("{}: {e}", path.display())))?;
    }
    let mut text = format!(
        "g = {g}\ns_hat = {}\nc_hat = {:.6e}\nresidual = {}\nbins = {} ({} trimmed)\nsamples = {} ({} unconverged)\n",
        num(fit.s_hat),
        fit.c_hat,
        num(fit.residual),
        fit.bins,
        fit.trimmed,
        fit.samples.len(),
        fit.unconverged
    );
    if let Some(nu) = fit.nu_hat {
        text.push_str(&format!("nu_hat = {}\n", num(nu)));
    }
    #[derive(Serialize)]
    struct Fit<'a> {
        g: String,
        s_hat: f64,
        c_hat: f64,
        nu_hat: Option<f64>,
        residual: f64,
        bins: usize,
        trimmed: usize,
        samples: usize,
        unconverged: usize,
        envelope: Vec<&'a determinacy::lojasiewicz::Sample>,
    }
    let value = Fit {
        g: g.to_string(),
        s_hat: fit.s_hat,
        c_hat: fit.c_hat,
        nu_hat: fit.nu_hat,
        residual: fit.residual,
        bins: fit.bins,
        trimmed: fit.trimmed,
        samples: fit.samples.len(),
        unconverged: fit.unconverged,
        envelope: fit.envelope().collect(),
    };
    Ok(Output::new(text, &value, OK))
}
