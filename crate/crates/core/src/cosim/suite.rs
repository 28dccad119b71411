//! Seeded verification suites, one per pass.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algorithm::Algorithm;
use crate::bundle::{AlgorithmBundle, Member};
use crate::dispatch::DispatchOptions;
use crate::eval::Silent;
use crate::parser::parse;
use crate::passes::normalize::clause_count;
use crate::passes::prune::prune;
use crate::passes::separate::separate_all;
use crate::passes::serialize::serialize;
use crate::printer::print;
use crate::value::{name, Value};

use super::gen::{generate_case, Case, GenConfig};
use super::normalization::{enumerate_states, verify_normalization};
use super::pruning::verify_pruning;
use super::separation::verify_separation;
use super::serialization::verify_serialization;
use super::shrink::shrink;
use super::{CaseFailure, CosimReport, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pass {
    Separate,
    Normalize,
    Serialize,
    Prune,
}

impl Pass {
    pub fn name(self) -> &'static str {
        match self {
            Pass::Separate => "separate",
            Pass::Normalize => "normalize",
            Pass::Serialize => "serialize",
            Pass::Prune => "prune",
        }
    }
}

impl fmt::Display for Pass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Pass {
    type Err = String;

    fn from_str(s: &str) -> Result<Pass, String> {
        match s {
            "separate" => Ok(Pass::Separate),
            "normalize" => Ok(Pass::Normalize),
            "serialize" => Ok(Pass::Serialize),
            "prune" => Ok(Pass::Prune),
            other => Err(format!("unknown pass `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub pass: Pass,
    pub seed: u64,
    pub count: usize,
    /// Steps per run (separation), states per rule (normalization),
    /// mega-steps per run (serialization), or the dispatch budget of each
    /// reference run (pruning).
    pub steps: usize,
    /// Variants tried when shrinking a failure; 0 disables shrinking.
    pub shrink_attempts: usize,
}

impl SuiteConfig {
    pub fn new(pass: Pass, seed: u64, count: usize, steps: usize) -> SuiteConfig {
        SuiteConfig {
            pass,
            seed,
            count,
            steps,
            shrink_attempts: 200,
        }
    }
}

/// Seed of case `i` of a suite seeded with `seed`.
pub fn case_seed(seed: u64, i: usize) -> u64 {
    ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)).gen()
}

pub fn generator_config(pass: Pass) -> GenConfig {
    let base = GenConfig::default();
    match pass {
        Pass::Serialize => GenConfig {
            min_extrinsics: 1,
            max_extrinsics: 3,
            partial_tables: false,
            disjoint_updates: true,
            ..base
        },
        _ => base,
    }
}

/// Largest normal form the normalization and serialization suites will
/// build. Normal forms grow multiplicatively with the width of parallel
/// blocks, and serialization starts from one; programs past this are
/// redrawn.
pub const NORMAL_FORM_LIMIT: u64 = 4096;

/// The case checked for `seed`. For normalization and serialization,
/// programs whose normal form exceeds [`NORMAL_FORM_LIMIT`] are replaced by
/// a redraw.
pub fn draw_case(pass: Pass, seed: u64) -> Case {
    let cfg = generator_config(pass);
    let mut attempt = 0;
    loop {
        let case = generate_case(&cfg.clone().with_seed(case_seed(seed, attempt)));
        let bounded = matches!(pass, Pass::Normalize | Pass::Serialize);
        if !bounded || clause_count(&case.algorithm.program) <= NORMAL_FORM_LIMIT {
            return case;
        }
        attempt += 1;
    }
}

fn verify_case(pass: Pass, case: &Case, steps: usize) -> Verdict {
    let env = case.env();
    let a = &case.algorithm;
    match pass {
        Pass::Separate => verify_separation(a, &separate_all(a), &case.inputs, &env, steps),
        Pass::Normalize => {
            let states = enumerate_states(a, &a.program, steps, case.oracle_seed);
            verify_normalization(&a.program, &states, &env)
        }
        Pass::Serialize => verify_serialization(a, &serialize(a), &case.inputs, &env, steps),
        Pass::Prune => unreachable!("bundles are checked separately"),
    }
}

/// A random terminating bundle: member `i` answers 0 with a constant and
/// otherwise combines the answers of one or two members on `x - 1`.
pub fn generate_bundle(seed: u64) -> AlgorithmBundle {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=3);
    let mut members = Vec::new();
    for i in 0..n {
        let base = rng.gen_range(0..3);
        let j = rng.gen_range(0..n);
        let k = rng.gen_range(0..n);
        let two = rng.gen_bool(0.4);
        let combine = if two {
            ["ite(eq(r, q), succ(r), q)", "ite(eq(q, 0), r, succ(r))"][rng.gen_range(0..2)]
        } else {
            ["succ(r)", "r", "pred(r)", "ite(eq(r, 0), 1, 0)"][rng.gen_range(0..4)]
        };
        let mut decls = format!("fn g{j}/1 extrinsic\n");
        let mut calls = format!("r := g{j}(pred(x));\n");
        if two {
            if k != j {
                decls.push_str(&format!("fn g{k}/1 extrinsic\n"));
            }
            calls.push_str(&format!("q := g{k}(pred(x));\n"));
        }
        let src = format!(
            "backend arithmetic\nfn x/0 in 0\nfn out/0 out\n{decls}fn r/0\nfn q/0\nfn started/0 relational\n\
             program\nif eq(x, 0) then out := {base}\n\
             else if not(started) then par {{ {calls} started := true }}\n\
             else out := {combine}\n"
        );
        let algorithm = parse(&src).expect("generated member parses");
        members.push(Member {
            label: format!("g{i}"),
            algorithm,
            objective: Some(name(format!("g{i}"))),
        });
    }
    AlgorithmBundle::new(members, BTreeMap::new(), Default::default()).expect("generated bundle is closed")
}

fn failure_for(i: usize, seed: u64, v: Verdict, shrunk: Option<&Algorithm>) -> CaseFailure {
    CaseFailure {
        case: i,
        seed,
        divergence: v.divergence.expect("failing verdict"),
        shrunk: shrunk.map(print),
    }
}

/// Runs `count` seeded cases of one pass and aggregates the verdicts.
/// Step budget for pruned machines in the pruning suite. One step of a
/// member becomes several regular steps plus call and return overhead, so
/// the suite's `steps` only bounds the dispatch reference.
pub const PRUNED_BUDGET: usize = 200_000;

pub fn run_suite(cfg: &SuiteConfig) -> CosimReport {
    crate::stack::with_deep_stack(|| run_suite_here(cfg))
}

fn run_suite_here(cfg: &SuiteConfig) -> CosimReport {
    let mut total = Verdict::default();
    let mut failures = Vec::new();
    let mut passed = 0;
    for i in 0..cfg.count {
        let seed = case_seed(cfg.seed, i);
        let (v, shrunk) = match cfg.pass {
            Pass::Prune => {
                let bundle = generate_bundle(seed);
                let inputs: Vec<Vec<Value>> = (0..5).map(|x| vec![Value::Nat(x)]).collect();
                let dispatch = DispatchOptions {
                    max_steps: cfg.steps,
                    max_depth: 64,
                };
                let v = match prune(&bundle) {
                    Ok(p) => verify_pruning(&bundle, &p, &inputs, &Silent, PRUNED_BUDGET, dispatch),
                    Err(e) => {
                        let mut v = Verdict::default();
                        v.check("prune", 0, false, || serde_json::json!({"error": e.to_string()}));
                        v
                    }
                };
                (v, None)
            }
            pass => {
                let case = draw_case(pass, seed);
                let v = verify_case(pass, &case, cfg.steps);
                let shrunk = (!v.passed() && cfg.shrink_attempts > 0).then(|| {
                    let claim = v.divergence.as_ref().unwrap().claim.clone();
                    let fails = |alg: &Algorithm| {
                        let c = Case {
                            algorithm: alg.clone(),
                            ..case.clone()
                        };
                        verify_case(pass, &c, cfg.steps)
                            .divergence
                            .is_some_and(|d| d.claim == claim)
                    };
                    shrink(&case.algorithm, &fails, cfg.shrink_attempts)
                });
                (v, shrunk)
            }
        };
        if v.passed() {
            passed += 1;
            total.merge(v);
        } else {
            let mut tally = v.clone();
            tally.divergence = None;
            total.merge(tally);
            failures.push(failure_for(i, seed, v, shrunk.as_ref()));
        }
    }
    let status = if failures.is_empty() { "pass" } else { "fail" };
    CosimReport {
        pass: cfg.pass.name().to_string(),
        seed: cfg.seed,
        cases: cfg.count,
        passed,
        steps: total.steps,
        claims: total.claims,
        failures,
        status: status.to_string(),
    }
}
