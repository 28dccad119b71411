//! Checks a pruned algorithm against oracle dispatch, auditing its call
//! stack at every step.

use std::collections::BTreeSet;

use serde_json::json;

use crate::bundle::AlgorithmBundle;
use crate::dispatch::{oracle_dispatch_run, DispatchOptions};
use crate::eval::{AccessKind, Oracle};
use crate::interp::{output_of, step, Outcome, RunStatus};
use crate::passes::prune::{Pruned, ACTIVE, INITIALIZED, MAX, SESSION, TOP, TOP_OF};
use crate::state::State;
use crate::value::Value;

use super::{outcome_json, values_json, Verdict};

fn nat(st: &State, sym: &str, args: &[Value]) -> u64 {
    st.read(sym, args).as_nat().unwrap_or(0)
}

/// Runs the pruned algorithm on one input vector, auditing the stack.
/// Returns the final status.
pub fn audit_run(
    pruned: &Pruned,
    inputs: &[Value],
    env: &dyn Oracle,
    budget: usize,
    v: &mut Verdict,
) -> RunStatus {
    let b = &pruned.algorithm;
    let members = pruned.layouts.len() as u64;
    let out0 = &pruned.layouts[0].output;
    let mut st = match b.initial_state(inputs) {
        Ok(s) => s,
        Err(e) => {
            v.check("inputs", 0, false, || json!({"error": e.to_string()}));
            return RunStatus::BudgetExhausted;
        }
    };
    let mut finished: BTreeSet<u64> = BTreeSet::new();
    for j in 0..budget {
        let (top, max, n) = (nat(&st, TOP, &[]), nat(&st, MAX, &[]), nat(&st, SESSION, &[]));
        v.check("stack-bounds", j, top <= max, || json!({"top": top, "max": max}));
        let toil = st.read(INITIALIZED, &[]).is_true() && st.read(out0, &[Value::Nat(0)]) == Value::Nil;
        if toil {
            let active = st.read(ACTIVE, &[Value::Nat(top)]);
            let ok = active.as_nat().is_some_and(|i| i < members);
            v.check("toil-exclusive", j, ok, || json!({"top": top, "active": active.to_json()}));
            let level = nat(&st, TOP_OF, &[Value::Nat(n)]);
            v.check("resume-level", j, level == top, || {
                json!({"session": n, "top_of": level, "top": top})
            });
        }

        let (next, rec) = step(b, &st, env, j);
        let stale: Vec<String> = rec
            .trace
            .accesses
            .iter()
            .filter(|acc| acc.kind == AccessKind::Dynamic && acc.symbol.starts_with("$m"))
            .filter(|acc| acc.args.first().and_then(Value::as_nat).is_some_and(|s| finished.contains(&s)))
            .map(|acc| format!("{}{:?}", acc.symbol, acc.args))
            .collect();
        v.check("abandoned-sessions", j, stale.is_empty(), || json!({"reads": stale}));
        if rec.outcome != Outcome::Advanced {
            v.check("advanced", j, false, || json!({"outcome": outcome_json(&rec.outcome)}));
            return match rec.outcome {
                Outcome::Failed(f) => RunStatus::Failed(f),
                Outcome::StuckOnOracle { symbol, args } => RunStatus::Stuck { symbol, args },
                Outcome::Advanced => unreachable!(),
            };
        }
        let (top2, max2, n2) = (nat(&next, TOP, &[]), nat(&next, MAX, &[]), nat(&next, SESSION, &[]));
        if max2 != max {
            v.check("session-fresh", j, max2 == max + 1 && n2 == max2 && top2 == top + 1, || {
                json!({"max": [max, max2], "session": [n, n2], "top": [top, top2]})
            });
        }
        if top2 + 1 == top {
            finished.insert(n);
        }
        st = next;
        if let Some(o) = output_of(b, &st) {
            let t = nat(&st, TOP, &[]);
            v.check("finish-top", j, t == 0, || json!({"top": t}));
            v.steps += j + 1;
            return RunStatus::OutputProduced(o);
        }
    }
    v.steps += budget;
    RunStatus::BudgetExhausted
}

/// Compares the pruned algorithm with oracle dispatch on every input
/// vector and runs the stack audits.
pub fn verify_pruning(
    bundle: &AlgorithmBundle,
    pruned: &Pruned,
    inputs: &[Vec<Value>],
    passthrough: &dyn Oracle,
    budget: usize,
    dispatch: DispatchOptions,
) -> Verdict {
    let mut v = Verdict::default();
    let effective = pruned
        .algorithm
        .vocabulary()
        .extrinsics()
        .all(|s| bundle.passthrough.contains(&s.name));
    v.check("effective", 0, effective, || json!({}));
    for xs in inputs {
        let reference = match oracle_dispatch_run(bundle, 0, xs, passthrough, dispatch) {
            Ok(r) => r.status,
            Err(e) => {
                v.check("reference", 0, false, || json!({"inputs": values_json(xs), "error": e.to_string()}));
                continue;
            }
        };
        let got = audit_run(pruned, xs, passthrough, budget, &mut v);
        let ok = match (&reference, &got) {
            (RunStatus::OutputProduced(p), RunStatus::OutputProduced(q)) => p == q,
            (RunStatus::OutputProduced(_), _) | (_, RunStatus::OutputProduced(_)) => false,
            _ => true,
        };
        v.check("output", 0, ok, || {
            json!({"inputs": values_json(xs), "reference": reference.name(),
                   "reference_output": reference.output().map(Value::to_json),
                   "pruned": got.name(), "pruned_output": got.output().map(Value::to_json)})
        });
    }
    v
}
