//! Mega-step check of an algorithm against its serialized form.

use std::collections::BTreeSet;

use serde_json::json;

use crate::algorithm::Algorithm;
use crate::eval::{AccessKind, Oracle};
use crate::interp::{output_of, step, Outcome};
use crate::passes::serialize::{check_shape, Serialized};
use crate::state::State;
use crate::value::Name;

use super::{outcome_json, values_json, Verdict};

fn restricted(st: &State, keep: &BTreeSet<Name>) -> String {
    format!("{:?}", st.restrict(&|s| keep.contains(s)))
}

/// Checks, for up to `megasteps` steps of `a`:
///
/// - every regular step of the serialized algorithm issues at most one
///   extrinsic query;
/// - the state reached when Done is raised, restricted to `a`'s dynamic
///   symbols, is `a`'s next state;
/// - the union of queries over the mega-step is `a`'s set of queries;
/// - the mega-step, reset step included, is no longer than the bound;
/// - failures, stalls and outputs happen in the corresponding mega-step;
/// - the program classifies into pure and tainted clauses.
pub fn verify_serialization(
    a: &Algorithm,
    s: &Serialized,
    inputs: &[crate::value::Value],
    env: &dyn Oracle,
    megasteps: usize,
) -> Verdict {
    let b = &s.algorithm;
    let mut v = Verdict::default();
    let shape = check_shape(b);
    v.check("shape", 0, shape.as_ref().is_ok_and(|k| *k == s.kinds), || {
        json!({"error": format!("{shape:?}")})
    });

    let keep: BTreeSet<Name> = a.vocabulary().dynamics().map(|d| d.name.clone()).collect();
    let (mut x, mut y) = match (a.initial_state(inputs), b.initial_state(inputs)) {
        (Ok(x), Ok(y)) => (x, y),
        _ => {
            v.check("inputs", 0, false, || json!({"inputs": values_json(inputs)}));
            return v;
        }
    };
    v.check("states", 0, restricted(&x, &keep) == restricted(&y, &keep), || json!({"mega_step": 0}));
    let mut regular = 0;

    for k in 0..megasteps {
        let (x2, ra) = step(a, &x, env, k);
        let mut queries = BTreeSet::new();
        let mut len = 0;
        let last = loop {
            let (y2, rb) = step(b, &y, env, regular);
            regular += 1;
            len += 1;
            let n = rb.trace.accesses.iter().filter(|acc| acc.kind == AccessKind::Extrinsic).count();
            v.check("one-query", k, n <= 1, || json!({"regular_step": regular - 1, "queries": n}));
            queries.extend(rb.trace.extrinsic_queries());
            if rb.outcome != Outcome::Advanced {
                break rb;
            }
            y = y2;
            if y.read(&s.done, &[]).is_true() {
                break rb;
            }
            if !v.check("bound", k, len < s.bound, || json!({"bound": s.bound, "length": len})) {
                return v;
            }
        };

        match (&ra.outcome, &last.outcome) {
            (Outcome::Advanced, Outcome::Advanced) => {}
            (Outcome::Failed(p), Outcome::Failed(q)) => {
                v.check("failure", k, p.class() == q.class(), || {
                    json!({"original": outcome_json(&ra.outcome), "serialized": outcome_json(&last.outcome)})
                });
                v.steps = k + 1;
                return v;
            }
            (p, q) => {
                let ok = matches!((p, q), (Outcome::StuckOnOracle { .. }, Outcome::StuckOnOracle { .. }));
                v.check("failure", k, ok, || {
                    json!({"original": outcome_json(p), "serialized": outcome_json(q)})
                });
                v.steps = k + 1;
                return v;
            }
        }

        let want = ra.trace.extrinsic_queries();
        v.check("query-union", k, queries == want, || {
            json!({"original": format!("{want:?}"), "serialized": format!("{queries:?}")})
        });
        v.check("states", k + 1, restricted(&x2, &keep) == restricted(&y, &keep), || {
            json!({"mega_step": k + 1, "original": restricted(&x2, &keep), "serialized": restricted(&y, &keep)})
        });
        x = x2;
        if let Some(out) = output_of(a, &x) {
            let other = output_of(b, &y);
            v.check("output", k, other.as_ref() == Some(&out), || {
                json!({"original": out.to_json(), "serialized": other.map(|o| o.to_json())})
            });
            v.steps = k + 1;
            return v;
        }

        // the resetting step closes the mega-step
        let (y2, rr) = step(b, &y, env, regular);
        regular += 1;
        len += 1;
        v.check("bound", k, len <= s.bound && rr.outcome == Outcome::Advanced, || {
            json!({"bound": s.bound, "length": len, "reset": outcome_json(&rr.outcome)})
        });
        y = y2;
        if v.divergence.is_some() {
            v.steps = k + 1;
            return v;
        }
    }
    v.steps = megasteps;
    v
}
