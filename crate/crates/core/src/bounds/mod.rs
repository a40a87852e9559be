//! The inequality catalog.
//!
//! Every evaluator reads its operators through one [`KernelFamily`] and
//! returns a [`BoundEvaluation`]: the left-hand side raised to the power the
//! inequality is stated at, every bound branch, the final bound, and (for
//! results that the worked examples compare against an earlier inequality)
//! the earlier bound rescaled to the same power.
//!
//! Bounds stated at different powers of `ber` are compared through
//! `normalized_bound = bound^(1 / exponent)`.

mod catalog;
mod instance;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use catalog::*;
pub use instance::BoundInstance;

/// Relative slack in `satisfied`.
pub const SATISFIED_RTOL: f64 = 1e-9;
/// Absolute slack in `satisfied`.
pub const SATISFIED_ATOL: f64 = 1e-12;

macro_rules! bound_ids {
    ($($variant:ident => $name:literal,)*) => {
        /// Stable identifiers for every inequality in the catalog.
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum BoundId {
            $($variant,)*
        }

        impl BoundId {
            pub const ALL: &'static [BoundId] = &[$(BoundId::$variant,)*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(BoundId::$variant => $name,)*
                }
            }
        }

        impl FromStr for BoundId {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok(BoundId::$variant),)*
                    other => Err(Error::UnknownBound(other.to_string())),
                }
            }
        }
    };
}

bound_ids! {
    ThmAssa => "thm-assa",
    RefAssa2 => "ref-assa2",
    ThmVbc => "thm-vbc",
    RefVbc1 => "ref-vbc1",
    ThmTh10 => "thm-th10",
    RefGfd => "ref-gfd",
    ThmNnbb => "thm-nnbb",
    RefXxcc => "ref-xxcc",
    ThmT1 => "thm-T1",
    CorEre => "cor-ere",
    RefGfd2 => "ref-gfd2",
    LemMm1 => "lem-mm1",
    ThmHjh => "thm-hjh",
    CorHjh => "cor-hjh",
    LemVirat => "lem-virat",
    ThmRohit => "thm-rohit",
    CorAni1 => "cor-ani1",
    RefAni20 => "ref-ani20",
    LemTrainvr => "lem-trainvr",
    ThmTrainv => "thm-trainv",
    RefPinh1 => "ref-pinh1",
    RefPinh2 => "ref-pinh2",
    ThmProblmI => "thm-problm-i",
    ThmProblmII => "thm-problm-ii",
    ThmSom => "thm-som",
    ThmRam => "thm-ram",
    RefRam33 => "ref-ram33",
    ThmRam44 => "thm-ram44",
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for BoundId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for BoundId {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a comma separated list of bound ids; `all` expands to the catalog.
pub fn parse_bound_list(list: &str) -> Result<Vec<BoundId>> {
    let mut out = Vec::new();
    for part in list.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if part == "all" {
            out.extend_from_slice(BoundId::ALL);
        } else {
            out.push(part.parse()?);
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidParameter("empty bound list".into()));
    }
    Ok(out)
}

/// Scalar knobs shared across the inequalities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub lambda: f64,
    pub r: f64,
    pub s: f64,
    pub gamma: f64,
    pub delta: f64,
    pub n_terms: usize,
}

impl Default for BoundParams {
    fn default() -> Self {
        Self { lambda: 0.5, r: 1.0, s: 1.0, gamma: 2.0, delta: 2.0, n_terms: 1 }
    }
}

impl BoundParams {
    /// Sets `gamma` and its Hölder conjugate `delta = gamma / (gamma - 1)`.
    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self.delta = gamma / (gamma - 1.0);
        self
    }

    pub fn check_lambda(&self) -> Result<()> {
        check_unit_interval("lambda", self.lambda)
    }

    pub fn check_r(&self) -> Result<()> {
        check_at_least_one("r", self.r)
    }

    pub fn check_s(&self) -> Result<()> {
        check_at_least_one("s", self.s)
    }

    pub fn check_conjugates(&self) -> Result<()> {
        check_conjugates(self.gamma, self.delta)
    }
}

pub(crate) fn check_unit_interval(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must lie in [0, 1], got {x}")))
    }
}

pub(crate) fn check_at_least_one(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be a finite real >= 1, got {x}")))
    }
}

pub(crate) fn check_conjugates(gamma: f64, delta: f64) -> Result<()> {
    if !(gamma > 1.0 && delta > 1.0 && gamma.is_finite() && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("gamma and delta must both exceed 1, got {gamma} and {delta}")));
    }
    if (1.0 / gamma + 1.0 / delta - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("gamma = {gamma} and delta = {delta} are not Hölder conjugates")));
    }
    Ok(())
}

/// One named bound branch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub name: String,
    pub value: f64,
}

/// Result of evaluating one inequality on one instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundEvaluation {
    pub bound_id: BoundId,
    /// The `e` such that `lhs` is `ber^e` (or `|.|_ber^e`) of the target.
    pub exponent: f64,
    pub lhs: f64,
    pub branches: Vec<Branch>,
    /// Minimum over `branches`; the first branch wins ties.
    pub bound: f64,
    /// Earlier bound on the same target, rescaled to `exponent`.
    pub reference_bound: Option<f64>,
    pub reference_id: Option<BoundId>,
    pub satisfied: bool,
    /// `bound^(1 / exponent)`.
    pub normalized_bound: f64,
}

impl BoundEvaluation {
    pub fn branch(&self, name: &str) -> Option<f64> {
        self.branches.iter().find(|b| b.name == name).map(|b| b.value)
    }

    /// `reference_bound^(1 / exponent)`.
    pub fn normalized_reference(&self) -> Option<f64> {
        self.reference_bound.map(|r| root(r, self.exponent))
    }

    /// `lhs / bound`, or `None` when the bound is zero.
    pub fn tightness(&self) -> Option<f64> {
        (self.bound > 0.0).then(|| self.lhs / self.bound)
    }
}

/// `lhs <= bound (1 + rtol) + atol`.
pub fn within(lhs: f64, bound: f64, rtol: f64, atol: f64) -> bool {
    lhs <= bound * (1.0 + rtol) + atol
}

pub(crate) fn root(x: f64, exponent: f64) -> f64 {
    x.max(0.0).powf(1.0 / exponent)
}

/// Builder that enforces the evaluation invariants.
pub(crate) struct Draft {
    pub id: BoundId,
    pub exponent: f64,
    pub lhs: f64,
    pub branches: Vec<Branch>,
    /// `(id, value, exponent the value is stated at)`.
    pub reference: Option<(BoundId, f64, f64)>,
}

impl Draft {
    pub fn new(id: BoundId, exponent: f64, lhs: f64) -> Self {
        Self { id, exponent, lhs, branches: Vec::new(), reference: None }
    }

    pub fn branch(mut self, name: &str, value: f64) -> Self {
        self.branches.push(Branch { name: name.to_string(), value });
        self
    }

    pub fn reference(mut self, id: BoundId, value: f64, exponent: f64) -> Self {
        self.reference = Some((id, value, exponent));
        self
    }

    pub fn reference_eval(self, reference: &BoundEvaluation) -> Self {
        self.reference(reference.bound_id, reference.bound, reference.exponent)
    }

    pub fn finish(self) -> Result<BoundEvaluation> {
        assert!(!self.branches.is_empty(), "every evaluation has at least one branch");
        let mut bound = self.branches[0].value;
        for b in &self.branches[1..] {
            if b.value < bound {
                bound = b.value;
            }
        }
        if !bound.is_finite() || !self.lhs.is_finite() {
            return Err(Error::NonFinite("bound value"));
        }
        let reference_bound = self.reference.map(|(_, value, e)| value.max(0.0).powf(self.exponent / e));
        Ok(BoundEvaluation {
            bound_id: self.id,
            exponent: self.exponent,
            lhs: self.lhs,
            satisfied: within(self.lhs, bound, SATISFIED_RTOL, SATISFIED_ATOL),
            normalized_bound: root(bound, self.exponent),
            branches: self.branches,
            bound,
            reference_bound,
            reference_id: self.reference.map(|(id, _, _)| id),
        })
    }
}
