//! Randomized verification: fuzz campaigns over the bound catalog, scalar
//! and vector lemma suites, and the golden worked-example suite.
//!
//! Every trial derives its own seed from `(seed, stream, trial)`, so reports
//! do not depend on how trials are scheduled across threads.

mod generate;
mod golden;
mod lemmas;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{parse_bound_list, within, BoundEvaluation, BoundId, BoundInstance};
use crate::error::{Error, Result};

pub use generate::{
    random_operator, random_unit_family, rng_from, sample_family, sample_instance, sample_params, sub_seed, FamilyKind,
    EXPONENT_GRID, SZEGO_RADIUS,
};
pub use golden::{paper_suite, GoldenReport, GoldenRow, GOLDEN_TOL};
pub use lemmas::{scalar_lemma_suite, vector_lemma_suite};

/// Violations within this multiple of the tolerance are labelled numerical.
pub const NUMERICAL_FACTOR: f64 = 10.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub seed: u64,
    pub trials: usize,
    pub dims: Vec<usize>,
    pub allow_rank_deficient: bool,
    pub family_kind: FamilyKind,
    pub bound_ids: Vec<String>,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for TrialConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 1000,
            dims: vec![2, 3, 4, 5, 6],
            allow_rank_deficient: true,
            family_kind: FamilyKind::Standard,
            bound_ids: BoundId::ALL.iter().map(|id| id.as_str().to_string()).collect(),
            rel_tol: 1e-9,
            abs_tol: 1e-12,
        }
    }
}

impl TrialConfig {
    pub fn validate(&self) -> Result<Vec<BoundId>> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(Error::InvalidParameter("dims must be a nonempty list of positive sizes".into()));
        }
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        parse_bound_list(&self.bound_ids.join(","))
    }
}

/// The default soundness campaign: every bound on the standard family and
/// on random unit-vector families.
pub fn default_campaign(seed: u64) -> Vec<TrialConfig> {
    [FamilyKind::Standard, FamilyKind::RandomUnit]
        .into_iter()
        .map(|family_kind| TrialConfig { seed, family_kind, ..TrialConfig::default() })
        .collect()
}

/// One failed trial with enough data to replay it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub trial: usize,
    pub seed: u64,
    /// `numerical`, `logical`, or `error`.
    pub label: String,
    pub lhs: Option<f64>,
    pub bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<BoundInstance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evaluation: Option<BoundEvaluation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inputs: Option<serde_json::Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family_kind: Option<FamilyKind>,
    pub trials_run: usize,
    /// Trials whose evaluation overflowed and carry no verdict.
    pub skipped: usize,
    pub violations: Vec<Violation>,
    /// Smallest `bound (1 + rel_tol) - lhs`.
    pub min_slack: Option<f64>,
    pub mean_tightness: Option<f64>,
    pub max_tightness: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub bounds: Vec<BoundReport>,
    pub overall_pass: bool,
}

impl TrialReport {
    pub fn new(bounds: Vec<BoundReport>) -> Self {
        let overall_pass = bounds.iter().all(|b| b.violations.is_empty());
        Self { bounds, overall_pass }
    }

    pub fn merge(reports: impl IntoIterator<Item = TrialReport>) -> Self {
        Self::new(reports.into_iter().flat_map(|r| r.bounds).collect())
    }

    pub fn violation_count(&self) -> usize {
        self.bounds.iter().map(|b| b.violations.len()).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// Outcome of one trial before aggregation.
pub(crate) enum Outcome {
    Checked { lhs: f64, bound: f64, violation: Option<Violation> },
    Skipped,
    Failed(Violation),
}

pub(crate) fn triage(lhs: f64, bound: f64, rel_tol: f64, abs_tol: f64) -> &'static str {
    let tol = bound.abs() * rel_tol + abs_tol;
    if lhs - bound <= NUMERICAL_FACTOR * tol {
        "numerical"
    } else {
        "logical"
    }
}

/// Folds trial outcomes, in trial order, into a per-bound summary.
pub(crate) fn summarize(
    bound_id: String,
    family_kind: Option<FamilyKind>,
    outcomes: Vec<Outcome>,
    rel_tol: f64,
) -> BoundReport {
    let mut report = BoundReport {
        bound_id,
        family_kind,
        trials_run: outcomes.len(),
        skipped: 0,
        violations: Vec::new(),
        min_slack: None,
        mean_tightness: None,
        max_tightness: None,
    };
    let mut tight_sum = 0.0;
    let mut tight_count = 0usize;
    for outcome in outcomes {
        match outcome {
            Outcome::Skipped => report.skipped += 1,
            Outcome::Failed(v) => report.violations.push(v),
            Outcome::Checked { lhs, bound, violation } => {
                let slack = bound * (1.0 + rel_tol) - lhs;
                report.min_slack = Some(report.min_slack.map_or(slack, |m: f64| m.min(slack)));
                if bound > 0.0 {
                    let t = lhs / bound;
                    tight_sum += t;
                    tight_count += 1;
                    report.max_tightness = Some(report.max_tightness.map_or(t, |m: f64| m.max(t)));
                }
                if let Some(v) = violation {
                    report.violations.push(v);
                }
            }
        }
    }
    if tight_count > 0 {
        report.mean_tightness = Some(tight_sum / tight_count as f64);
    }
    report
}

fn run_one(id: BoundId, config: &TrialConfig, stream: u64, trial: usize) -> Outcome {
    let seed = sub_seed(config.seed, stream, trial as u64);
    let mut rng = rng_from(seed);
    let dim = config.dims[trial % config.dims.len()];
    let instance = match sample_instance(id, dim, config.family_kind, config.allow_rank_deficient, &mut rng) {
        Ok(inst) => inst,
        Err(e) => {
            return Outcome::Failed(Violation {
                trial,
                seed,
                label: "error".into(),
                lhs: None,
                bound: None,
                message: Some(format!("instance generation failed: {e}")),
                instance: None,
                evaluation: None,
                inputs: None,
            })
        }
    };
    match instance.evaluate() {
        Ok(ev) => {
            let ok = within(ev.lhs, ev.bound, config.rel_tol, config.abs_tol);
            let violation = (!ok).then(|| Violation {
                trial,
                seed,
                label: triage(ev.lhs, ev.bound, config.rel_tol, config.abs_tol).into(),
                lhs: Some(ev.lhs),
                bound: Some(ev.bound),
                message: None,
                instance: Some(instance.clone()),
                evaluation: Some(ev.clone()),
                inputs: None,
            });
            Outcome::Checked { lhs: ev.lhs, bound: ev.bound, violation }
        }
        Err(Error::NonFinite(_)) => Outcome::Skipped,
        Err(e) => Outcome::Failed(Violation {
            trial,
            seed,
            label: "error".into(),
            lhs: None,
            bound: None,
            message: Some(e.to_string()),
            instance: Some(instance),
            evaluation: None,
            inputs: None,
        }),
    }
}

fn stream_of(id: BoundId, kind: FamilyKind) -> u64 {
    let index = BoundId::ALL.iter().position(|&b| b == id).expect("id in catalog") as u64;
    (index << 8) | kind as u64
}

/// Runs `config.trials` random instances for every requested bound.
pub fn run_trials(config: &TrialConfig) -> Result<TrialReport> {
    let ids = config.validate()?;
    let bounds = ids
        .iter()
        .map(|&id| {
            let stream = stream_of(id, config.family_kind);
            let outcomes: Vec<Outcome> =
                (0..config.trials).into_par_iter().map(|t| run_one(id, config, stream, t)).collect();
            summarize(id.as_str().to_string(), Some(config.family_kind), outcomes, config.rel_tol)
        })
        .collect();
    Ok(TrialReport::new(bounds))
}

/// Runs several configurations and concatenates their reports.
pub fn run_campaign(configs: &[TrialConfig]) -> Result<TrialReport> {
    let reports = configs.iter().map(run_trials).collect::<Result<Vec<_>>>()?;
    Ok(TrialReport::merge(reports))
}
