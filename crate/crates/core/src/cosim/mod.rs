//! Co-simulation harness: runs original and transformed algorithms side by
//! side and checks the claims relating their computations.

pub mod gen;
pub mod normalization;
pub mod pruning;
pub mod separation;
pub mod serialization;
pub mod shrink;
pub mod suite;

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value as Json;

use crate::interp::Outcome;
use crate::trace::failure_json;
use crate::value::Value;

pub use gen::{generate, generate_case, Case, GenConfig};
pub use suite::{run_suite, Pass, SuiteConfig};

/// The first point where two computations disagree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Divergence {
    pub step: usize,
    pub claim: String,
    pub witness: Json,
}

/// How often a claim was checked and how often it failed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub checked: usize,
    pub failed: usize,
}

/// Outcome of verifying one pair of computations.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Verdict {
    pub steps: usize,
    pub claims: BTreeMap<String, Tally>,
    pub divergence: Option<Divergence>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.divergence.is_none()
    }

    /// Records one check of `claim`; the first failure becomes the
    /// divergence. Returns `ok`.
    pub fn check(&mut self, claim: &str, step: usize, ok: bool, witness: impl FnOnce() -> Json) -> bool {
        let t = self.claims.entry(claim.to_string()).or_default();
        t.checked += 1;
        if !ok {
            t.failed += 1;
            if self.divergence.is_none() {
                self.divergence = Some(Divergence {
                    step,
                    claim: claim.to_string(),
                    witness: witness(),
                });
            }
        }
        ok
    }

    pub fn merge(&mut self, other: Verdict) {
        self.steps += other.steps;
        for (k, t) in other.claims {
            let e = self.claims.entry(k).or_default();
            e.checked += t.checked;
            e.failed += t.failed;
        }
        if self.divergence.is_none() {
            self.divergence = other.divergence;
        }
    }
}

/// A failing case of a suite, replayable from its seed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseFailure {
    pub case: usize,
    pub seed: u64,
    pub divergence: Divergence,
    /// Printed source of the smallest failing variant found.
    pub shrunk: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CosimReport {
    pub pass: String,
    pub seed: u64,
    pub cases: usize,
    pub passed: usize,
    pub steps: usize,
    pub claims: BTreeMap<String, Tally>,
    pub failures: Vec<CaseFailure>,
    pub status: String,
}

impl CosimReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Json {
        serde_json::to_value(self).expect("report serializes")
    }
}

pub(crate) fn outcome_json(o: &Outcome) -> Json {
    match o {
        Outcome::Advanced => Json::from("Advanced"),
        Outcome::Failed(f) => serde_json::json!({ "Failed": failure_json(f) }),
        Outcome::StuckOnOracle { symbol, args } => serde_json::json!({
            "StuckOnOracle": { "symbol": &**symbol, "args": values_json(args) }
        }),
    }
}

pub(crate) fn values_json(vs: &[Value]) -> Json {
    Json::Array(vs.iter().map(Value::to_json).collect())
}
