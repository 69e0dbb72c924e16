//! Executes the checks of a suite and writes one report per check plus a
//! summary.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use oe_core::actions::{base_projection_reconstructor, check_coinduced_characterization, Characterization, CharacterizationParams, FactorMap};
use oe_core::constructions::{
    check_section, FiniteAction, IdentityOe, IdentityOracle, Lemma2, Lemma2Params, Lemma3, Lemma3Params, LemmaFactor,
    LemmaFactorParams, Matcher, ReturnOracle, StableOe, StarAction, StarParams, TheoremB, TheoremBParams, ZOracle,
};
use oe_core::verify::{lemma_indep_check, LemmaIndepInstance, REPORT_SCHEMA_VERSION};
use oe_core::{Coinduced, Error, GroupSpec, InnerAction, Length, Mode, RMode, Verdict, VerificationReport};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{
    AppendixCheck, CharacterizationCheck, Check, CheckSpec, ConfigError, InnerDecl, InstanceDecl, Lemma3Check, OracleDecl,
    StableOeDecl, SuiteConfig,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_UNDETERMINED: i32 = 2;
pub const EXIT_MALFORMED: i32 = 3;

pub fn exit_code(v: Verdict) -> i32 {
    match v {
        Verdict::Pass => EXIT_PASS,
        Verdict::Fail => EXIT_FAIL,
        Verdict::Undetermined => EXIT_UNDETERMINED,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    Text,
    #[default]
    Structured,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Run only these checks (by name); all when empty.
    pub only: Vec<String>,
    pub seed_override: Option<u64>,
    pub budget: Option<u64>,
    pub format: Format,
}

/// One check's report as written to disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub name: String,
    pub kind: String,
    pub report: VerificationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryEntry {
    pub name: String,
    pub kind: String,
    pub verdict: Verdict,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: u32,
    pub verdict: Verdict,
    pub exit_code: i32,
    pub checks: Vec<SummaryEntry>,
}

#[derive(Debug, thiserror::Error)]
pub enum SuiteError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl SuiteError {
    pub fn exit_code(&self) -> i32 {
        EXIT_MALFORMED
    }
}

/// Applies the overrides and runs the selected checks, in parallel.
pub fn execute(config: &SuiteConfig, opts: &RunOptions) -> Result<Vec<(Check, VerificationReport)>, ConfigError> {
    for name in &opts.only {
        if !config.checks.iter().any(|c| &c.name == name) {
            return Err(ConfigError { field: "only".into(), message: format!("no check named `{name}`") });
        }
    }
    let selected: Vec<Check> = config
        .checks
        .iter()
        .filter(|c| opts.only.is_empty() || opts.only.contains(&c.name))
        .cloned()
        .map(|mut c| {
            if let (Some(s), Some(seed)) = (opts.seed_override, c.spec.seed_mut()) {
                *seed = s;
            }
            if let (Some(b), Some(budget)) = (opts.budget, c.spec.budget_mut()) {
                *budget = b;
            }
            c
        })
        .collect();
    let results: Vec<Result<VerificationReport, ConfigError>> = selected
        .par_iter()
        .map(|c| {
            let start = Instant::now();
            let mut r = run_check(config, c)?;
            r.timing_ms = Some(start.elapsed().as_millis() as u64);
            Ok(r)
        })
        .collect();
    selected.into_iter().zip(results).map(|(c, r)| r.map(|r| (c, r))).collect()
}

/// Runs a suite document and writes `<name>.json` (or `.txt`) per check and
/// a `summary` file into `out`.
pub fn run_suite(config_path: &Path, out: &Path, opts: &RunOptions) -> Result<Summary, SuiteError> {
    let config = SuiteConfig::from_path(config_path)?;
    let results = execute(&config, opts)?;
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| SuiteError::Io { path, source }
    };
    std::fs::create_dir_all(out).map_err(io(out))?;
    let ext = match opts.format {
        Format::Structured => "json",
        Format::Text => "txt",
    };
    let mut checks = Vec::new();
    let mut verdict = Verdict::Pass;
    for (check, report) in results {
        let file = format!("{}.{ext}", check.name);
        let body = match opts.format {
            Format::Structured => {
                let doc = ReportDocument {
                    schema_version: REPORT_SCHEMA_VERSION,
                    name: check.name.clone(),
                    kind: check.spec.kind().into(),
                    report: report.clone(),
                };
                serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"
            }
            Format::Text => format!("{} ({})\n{}", check.name, check.spec.kind(), report.to_text()),
        };
        let path = out.join(&file);
        std::fs::write(&path, body).map_err(io(&path))?;
        verdict = verdict.and(report.verdict);
        checks.push(SummaryEntry { name: check.name, kind: check.spec.kind().into(), verdict: report.verdict, file });
    }
    let summary = Summary { schema_version: REPORT_SCHEMA_VERSION, verdict, exit_code: exit_code(verdict), checks };
    let path = out.join(format!("summary.{ext}"));
    let body = match opts.format {
        Format::Structured => serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n",
        Format::Text => summary_text(&summary),
    };
    std::fs::write(&path, body).map_err(io(&path))?;
    Ok(summary)
}

pub fn summary_text(s: &Summary) -> String {
    let mut out = String::new();
    for c in &s.checks {
        out.push_str(&format!("{:<13} {} ({})\n", verdict_word(c.verdict), c.name, c.kind));
    }
    out.push_str(&format!("{:<13} suite, exit {}\n", verdict_word(s.verdict), s.exit_code));
    out
}

fn verdict_word(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "PASS",
        Verdict::Fail => "FAIL",
        Verdict::Undetermined => "UNDETERMINED",
    }
}

fn malformed(check: &Check, key: &str, e: impl ToString) -> ConfigError {
    ConfigError { field: format!("checks.{}.{key}", check.name), message: e.to_string() }
}

/// Errors raised while a check runs. Malformed instances are configuration
/// errors; anything else becomes the check's verdict.
fn settle(check: &Check, result: oe_core::Result<VerificationReport>) -> Result<VerificationReport, ConfigError> {
    match result {
        Ok(r) => Ok(r),
        Err(e @ (Error::Precondition(_) | Error::Word(_) | Error::GroupTable(_))) => {
            Err(ConfigError { field: format!("checks.{}", check.name), message: e.to_string() })
        }
        Err(e) => {
            let mut r = VerificationReport::new(check.spec.kind(), Mode::Exact);
            match e {
                Error::BudgetExceeded { .. } | Error::Undetermined(_) => r.undetermined(e.to_string()),
                _ => r.fail(e.to_string()),
            }
            Ok(r)
        }
    }
}

pub fn run_check(config: &SuiteConfig, check: &Check) -> Result<VerificationReport, ConfigError> {
    match &check.spec {
        CheckSpec::TheoremB(c) => {
            let tb = TheoremB::new(config.group(&c.group).clone(), c.rank).map_err(|e| malformed(check, "rank", e))?;
            let p = TheoremBParams {
                radius: c.radius,
                equivariance_length: c.equivariance_length,
                roundtrip_radius: c.roundtrip_radius,
                samples: c.samples,
                seed: c.seed,
                budget: c.budget,
            };
            settle(check, tb.suite(&p))
        }
        CheckSpec::Lemma2(c) => {
            let oracle: Arc<dyn ZOracle> = match c.oracle {
                OracleDecl::FirstReturn => Arc::new(ReturnOracle { symbol: c.return_symbol, radius: c.matcher_radius }),
                OracleDecl::Identity => Arc::new(IdentityOracle),
            };
            let l2 = Lemma2::new(c.kappa, Matcher { radius: c.matcher_radius }, oracle).map_err(|e| malformed(check, "kappa", e))?;
            let p = Lemma2Params {
                samples: c.samples,
                seed: c.seed,
                scan_samples: c.scan_samples,
                gate: c.gate,
                mc_samples: c.mc_samples,
                quantile: c.quantile,
            };
            settle(check, l2.suite(&p))
        }
        CheckSpec::LemmaIndep(c) => {
            let inst = LemmaIndepInstance {
                x_size: c.x_size,
                x0_size: c.x0_size,
                h_action: c.h_action.clone(),
                index_size: c.index_size,
                family: c.family.clone(),
            };
            settle(check, lemma_indep_check(&inst, c.budget))
        }
        CheckSpec::CoinductionCharacterization(c) => characterization(config, check, c),
        CheckSpec::LemmaFactor(c) => {
            let lf = LemmaFactor::new(config.group(&c.gamma).clone(), config.group(&c.lambda).clone(), config.group(&c.k).clone())
                .map_err(|e| malformed(check, "gamma", e))?;
            let p = LemmaFactorParams { radius: c.radius, samples: c.samples, seed: c.seed, budget: c.budget };
            settle(check, lf.suite(&p))
        }
        CheckSpec::StarAction(c) => {
            let k = config.group(&c.k);
            let twist = c
                .twist
                .iter()
                .map(|t| k.element_by_name(t).ok_or_else(|| malformed(check, "twist", format!("`{t}` is not an element of {}", k.name()))))
                .collect::<Result<Vec<u32>, _>>()?;
            let s = StarAction::new(k.clone(), twist).map_err(|e| malformed(check, "twist", e))?;
            let p = StarParams { radius: c.radius, samples: c.samples, seed: c.seed, budget: c.budget };
            settle(check, s.suite(&p))
        }
        CheckSpec::Lemma3(c) => match c.base {
            StableOeDecl::Lemma2 => {
                let oracle = Arc::new(ReturnOracle { symbol: 0, radius: c.matcher_radius });
                let l2 = Lemma2::new(c.kappa, Matcher { radius: c.matcher_radius }, oracle).map_err(|e| malformed(check, "kappa", e))?;
                lemma3(check, c, &l2)
            }
            StableOeDecl::Identity => {
                if c.kappa == 0 {
                    return Err(malformed(check, "kappa", "must be positive"));
                }
                lemma3(check, c, &IdentityOe { action: Coinduced::twisted_free(c.kappa) })
            }
        },
        CheckSpec::AppendixSection(c) => appendix(config, check, c),
    }
}

fn lemma3<S: StableOe>(check: &Check, c: &Lemma3Check, soe: &S) -> Result<VerificationReport, ConfigError> {
    let l3 = Lemma3::new(soe, c.y_alphabet).map_err(|e| malformed(check, "y_alphabet", e))?;
    for (word, _) in &c.members {
        soe.lambda().parse(word).map_err(|e| malformed(check, "members", e))?;
    }
    let p = Lemma3Params {
        samples: c.samples,
        seed: c.seed,
        indep_points: c.indep_points,
        members: c.members.clone(),
        budget: c.budget,
    };
    settle(check, l3.suite(&p))
}

fn characterization(config: &SuiteConfig, check: &Check, c: &CharacterizationCheck) -> Result<VerificationReport, ConfigError> {
    let action = match c.instance {
        InstanceDecl::TwistedFree => {
            if c.kappa == 0 {
                return Err(malformed(check, "kappa", "must be positive"));
            }
            Coinduced::twisted_free(c.kappa)
        }
        InstanceDecl::FreeProduct => {
            let parts = c
                .factors
                .iter()
                .map(|f| match f.group.as_str() {
                    "integers" => GroupSpec::integers(&f.label),
                    name => GroupSpec::finite(&f.label, config.group(name).clone()),
                })
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| malformed(check, "factors", e))?;
            let group = GroupSpec::free_product(&parts).map_err(|e| malformed(check, "factors", e))?;
            let Some(sub) = c.factors.get(c.subgroup) else {
                return Err(malformed(check, "subgroup", format!("only {} factors", c.factors.len())));
            };
            let inner = match (c.inner, sub.group.as_str()) {
                (InnerDecl::Trivial, _) => InnerAction::Trivial { alphabet: c.alphabet },
                (InnerDecl::LeftRegular, "integers") => return Err(malformed(check, "inner", "ℤ has no finite left-regular action")),
                (InnerDecl::LeftRegular, name) => InnerAction::left_regular(config.group(name)),
            };
            Coinduced::new(group, c.subgroup, RMode::Transversal, inner).map_err(|e| malformed(check, "subgroup", e))?
        }
    };
    let rho = FactorMap::base_projection(action.subgroup);
    let rec = match base_projection_reconstructor(&action, c.radius) {
        Ok(r) => r,
        Err(e) => return settle(check, Err(e)),
    };
    let input = Characterization {
        action: &action,
        group: &action.group,
        subgroup: action.subgroup,
        length: Length::Word,
        inner: &action.inner,
        rho: &rho,
        targets: None,
        reconstructor: Some(&rec),
    };
    let p = CharacterizationParams {
        radius: c.radius,
        word_cap: c.word_cap,
        samples: c.samples,
        seed: c.seed,
        budget: c.budget,
        mc_samples: c.mc_samples,
    };
    settle(check, check_coinduced_characterization(&input, &p))
}

fn appendix(config: &SuiteConfig, check: &Check, c: &AppendixCheck) -> Result<VerificationReport, ConfigError> {
    let group = config.group(&c.group).clone();
    let action = match (&c.table, c.copies) {
        (Some(table), None) => FiniteAction::new(group, table.clone()).map_err(|e| malformed(check, "table", e))?,
        (None, Some(copies)) => {
            let n = group.order() * copies;
            let relabel = c.relabel.clone().unwrap_or_else(|| (0..n).collect());
            FiniteAction::free_copies(group, copies, &relabel).map_err(|e| malformed(check, "relabel", e))?
        }
        _ => return Err(malformed(check, "table", "give exactly one of `table` and `copies`")),
    };
    settle(check, check_section(&action))
}
