use std::path::Path;

use determinacy::algebra::{parse_poly, var_list, Polynomial, VarList};
use determinacy::carleman::{AdmissibleFunction, TameSequence};
use determinacy::fitting::MapGerm;
use determinacy::lojasiewicz::{geometric_radii, DistanceMethod, SamplePlan, SetDescriptor, SetPiece};
use serde::{Deserialize, Serialize};

use crate::report::num;
use crate::DeterminacyError;

/// How `g` is chosen inside `K_f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GStrategy {
    /// Nonzero minor of lowest total degree, first in minor order on ties.
    LowestDegreeMinor,
    UserSupplied(Polynomial),
    /// Every distinct minor is fitted; the smallest exponent wins.
    AllMinorsBestFit,
}

impl GStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            GStrategy::LowestDegreeMinor => "lowest-degree minor",
            GStrategy::UserSupplied(_) => "user supplied",
            GStrategy::AllMinorsBestFit => "all minors, best fit",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyConfig {
    LowestDegreeMinor,
    UserSupplied(String),
    AllMinorsBestFit,
}

/// Overrides of the default sample plan.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanConfig {
    /// Explicit radii; takes precedence over `log2_range`.
    pub radii: Option<Vec<f64>>,
    /// `(from, to)` exponents of 2, stepped by `1/per_octave`.
    pub log2_range: Option<(f64, f64)>,
    pub per_octave: Option<usize>,
    pub directions: Option<usize>,
    pub seed: Option<u64>,
    pub fit_log: Option<bool>,
    pub fit_window: Option<(f64, f64)>,
    /// Number of random starts of the penalty method.
    pub starts: Option<usize>,
}

impl PlanConfig {
    pub fn to_plan(&self) -> SamplePlan {
        let mut plan = SamplePlan::default();
        if let Some(r) = &self.radii {
            plan.radii = r.clone();
        } else if self.log2_range.is_some() || self.per_octave.is_some() {
            let (from, to) = self.log2_range.unwrap_or((-4.0, -18.0));
            plan.radii = geometric_radii(from, to, self.per_octave.unwrap_or(4).max(1));
        }
        if let Some(d) = self.directions {
            plan.directions = d;
        }
        if let Some(s) = self.seed {
            plan.seed = s;
        }
        if let Some(f) = self.fit_log {
            plan.fit_log = f;
        }
        plan.fit_window = self.fit_window;
        if let Some(starts) = self.starts {
            plan.method = DistanceMethod::Penalty { starts, seed: 0 };
        }
        plan
    }
}

/// On-disk problem description (JSON).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub variables: Vec<String>,
    pub f: String,
    #[serde(default)]
    pub psi: Option<Vec<String>>,
    #[serde(rename = "Y", default)]
    pub y: Option<SetDescriptor>,
    #[serde(default)]
    pub sequence: Option<TameSequence>,
    #[serde(default)]
    pub theta: Option<AdmissibleFunction>,
    #[serde(default)]
    pub strategy: Option<StrategyConfig>,
    #[serde(default)]
    pub plan: Option<PlanConfig>,
}

impl ProblemConfig {
    pub fn from_json(text: &str) -> Result<Self, DeterminacyError> {
        serde_json::from_str(text).map_err(|e| DeterminacyError::Invalid(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, DeterminacyError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| DeterminacyError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

/// Validated inputs of the analysis.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub vars: VarList,
    pub f: Polynomial,
    pub psi: MapGerm,
    pub y: SetDescriptor,
    pub sequence: TameSequence,
    pub theta: Option<AdmissibleFunction>,
    pub strategy: GStrategy,
    pub plan: SamplePlan,
}

fn invalid(what: &str, e: impl std::fmt::Display) -> DeterminacyError {
    DeterminacyError::Invalid(format!("{what}: {e}"))
}

impl ProblemSpec {
    /// Missing `psi` defaults to the coordinate functions, `Y` to the origin,
    /// `sequence` to `GevreyLog(1, 0)` and the strategy to the lowest-degree
    /// minor.
    pub fn from_config(cfg: &ProblemConfig) -> Result<Self, DeterminacyError> {
        if cfg.variables.is_empty() {
            return Err(DeterminacyError::Invalid("no variables".into()));
        }
        let vars = var_list(&cfg.variables);
        let parse = |what: &str, t: &str| parse_poly(t, &vars).map_err(|e| invalid(what, e));
        let f = parse("f", &cfg.f)?;
        if !vanishes_at_origin(&f) {
            return Err(DeterminacyError::Invalid("f must vanish at the origin".into()));
        }
        let psi = match &cfg.psi {
            Some(list) => {
                let comps = list.iter().map(|t| parse("psi", t)).collect::<Result<Vec<_>, _>>()?;
                MapGerm::new(comps).map_err(|e| invalid("psi", e))?
            }
            None => identity_germ(&vars),
        };
        let y = match &cfg.y {
            Some(y) => SetDescriptor::new(y.pieces.clone(), vars.len()).map_err(|e| invalid("Y", e))?,
            None => SetDescriptor::origin(),
        };
        let sequence = cfg.sequence.clone().unwrap_or(TameSequence::GevreyLog { alpha: 1.0, beta: 0.0 });
        validate_sequence(&sequence)?;
        let strategy = match &cfg.strategy {
            None | Some(StrategyConfig::LowestDegreeMinor) => GStrategy::LowestDegreeMinor,
            Some(StrategyConfig::AllMinorsBestFit) => GStrategy::AllMinorsBestFit,
            Some(StrategyConfig::UserSupplied(t)) => GStrategy::UserSupplied(parse("strategy", t)?),
        };
        let plan = cfg.plan.clone().unwrap_or_default().to_plan();
        Ok(ProblemSpec { vars, f, psi, y, sequence, theta: cfg.theta, strategy, plan })
    }
}

fn vanishes_at_origin(f: &Polynomial) -> bool {
    f.constant_term() == determinacy::algebra::Rational::from_integer(0.into())
}

pub(crate) fn validate_sequence(m: &TameSequence) -> Result<(), DeterminacyError> {
    match m {
        TameSequence::GevreyLog { alpha, beta } => {
            TameSequence::gevrey_log(*alpha, *beta).map_err(|e| invalid("sequence", e))?;
        }
        TameSequence::Tabulated { log_values } => {
            TameSequence::from_log_values(log_values.clone()).map_err(|e| invalid("sequence", e))?;
        }
    }
    Ok(())
}

/// `ψ(x) = x`.
pub fn identity_germ(vars: &VarList) -> MapGerm {
    let comps = (0..vars.len()).map(|i| Polynomial::var(vars, i).expect("index in range")).collect();
    MapGerm::new(comps).expect("coordinates vanish at the origin")
}

/// Short description of a set for reports.
pub fn describe_set(y: &SetDescriptor) -> String {
    let pieces: Vec<String> = y
        .pieces
        .iter()
        .map(|p| match p {
            SetPiece::Origin => "{0}".to_string(),
            SetPiece::Subspace { vanishing } => {
                let idx: Vec<String> = vanishing.iter().map(|i| format!("x{}", i + 1)).collect();
                format!("{{{} = 0}}", idx.join(" = "))
            }
            SetPiece::Arc { components } => {
                let comps: Vec<String> = components
                    .iter()
                    .map(|c| {
                        let sign = if c.signed { "±" } else { "" };
                        let log = if c.log_power != 0.0 {
                            format!("·ln(1+1/t)^{}", num(c.log_power))
                        } else {
                            String::new()
                        };
                        let coef = if c.coef == 1.0 { String::new() } else { format!("{}·", num(c.coef)) };
                        let power = if c.power == 1.0 { "t".to_string() } else { format!("t^{}", num(c.power)) };
                        if c.coef == 0.0 {
                            "0".to_string()
                        } else {
                            format!("{sign}{coef}{power}{log}")
                        }
                    })
                    .collect();
                format!("arc t ↦ ({})", comps.join(", "))
            }
        })
        .collect();
    pieces.join(" ∪ ")
}
