//! Lock-step check of an algorithm against its separated form.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::json;

use crate::algorithm::Algorithm;
use crate::eval::{eval_term, AccessKind, EvalTrace, Failure, Halt, Oracle};
use crate::interp::{output_of, step, Outcome};
use crate::passes::separate::SeparationCert;
use crate::printer::print_term;
use crate::state::State;
use crate::structure::StaticValue;
use crate::syntax::Term;
use crate::value::{Name, Value};

use super::{outcome_json, values_json, Verdict};

/// `ite(δ(x), d(x), s(x))` read directly off the state of the separated
/// algorithm.
fn reconstructed(y: &State, cert: &SeparationCert, f: &Name, args: &[Value]) -> Option<Value> {
    let tr = &cert.renaming[f];
    if y.read(&tr.delta, args).is_true() {
        return Some(y.read(&tr.d, args));
    }
    let s = y.structure.vocabulary.get(&tr.s)?;
    match y.structure.table_value(s, args) {
        StaticValue::Defined(v) => Some(v),
        StaticValue::Undefined => None,
    }
}

fn eval_result(st: &State, t: &Term, env: &dyn Oracle) -> Result<Value, Halt> {
    eval_term(st, t, env, &mut EvalTrace::new())
}

/// Applications in `trace`, without the symbols in `skip`.
fn applications(trace: &EvalTrace, skip: &BTreeSet<Name>) -> BTreeSet<(Name, Vec<Value>)> {
    trace
        .accesses
        .iter()
        .filter(|a| !skip.contains(&a.symbol))
        .map(|a| (a.symbol.clone(), a.args.clone()))
        .collect()
}

fn failure_matches(fa: &Failure, fb: &Failure, cert: &SeparationCert) -> bool {
    match (fa, fb) {
        (Failure::Undefined { symbol: s1, args: a1 }, Failure::Undefined { symbol: s2, args: a2 }) => {
            s1 == s2 && a1 == a2
        }
        (Failure::Contradiction { location: l1, .. }, Failure::Contradiction { location: l2, .. }) => {
            let expected = cert.renaming.get(&l1.symbol).map_or(&l1.symbol, |tr| &tr.d);
            expected == &l2.symbol && l1.args == l2.args
        }
        (a, b) => a.class() == b.class(),
    }
}

/// Checks, at every step `j` within `budget`:
///
/// - (a) `ite(δ(x), d(x), s(x))` in B equals `f(x)` in A at every touched
///   `x`, and the remaining dynamic functions agree;
/// - (b) every other basic function is applied at the same arguments;
/// - (c) every term `t` of A's program has the value of its rewriting;
/// - (d) `s` is applied exactly where A applies `f` at a not yet updated
///   location;
/// - (e) B fails exactly when A fails, in the same way.
pub fn verify_separation(
    a: &Algorithm,
    cert: &SeparationCert,
    inputs: &[Value],
    env: &dyn Oracle,
    budget: usize,
) -> Verdict {
    let b = &cert.algorithm;
    let mut v = Verdict::default();
    let (mut x, mut y) = match (a.initial_state(inputs), b.initial_state(inputs)) {
        (Ok(x), Ok(y)) => (x, y),
        (ra, rb) => {
            v.check("e", 0, ra.is_err() && rb.is_err(), || {
                json!({"inputs": values_json(inputs), "original": ra.is_ok(), "separated": rb.is_ok()})
            });
            return v;
        }
    };

    let separated: BTreeSet<Name> = cert.renaming.keys().cloned().collect();
    let added: BTreeSet<Name> = cert
        .renaming
        .values()
        .flat_map(|t| [t.s.clone(), t.d.clone(), t.delta.clone()])
        .collect();
    let terms: BTreeSet<&Term> = a.program.all_subterms().into_iter().collect();
    let rewritten: BTreeMap<&Term, Term> = terms.iter().map(|t| (*t, cert.rewrite(t))).collect();
    // touched tuples per separated symbol; updated locations of A so far
    let mut touched: BTreeMap<Name, BTreeSet<Vec<Value>>> = BTreeMap::new();
    for f in &separated {
        let e = touched.entry(f.clone()).or_default();
        if let Some(init) = a.init.get(f) {
            e.extend(init.keys().cloned());
        }
    }
    let mut updated: BTreeSet<(Name, Vec<Value>)> = BTreeSet::new();

    let mut j = 0;
    loop {
        // (a)
        for f in &separated {
            let tr = &cert.renaming[f];
            let t = touched.get_mut(f).unwrap();
            t.extend(x.overrides(f).map(|(k, _)| k.clone()));
            t.extend(y.overrides(&tr.d).map(|(k, _)| k.clone()));
            t.extend(y.overrides(&tr.delta).map(|(k, _)| k.clone()));
            for args in t.iter() {
                let want = x.read(f, args);
                let got = reconstructed(&y, cert, f, args);
                let ok = got.as_ref() == Some(&want);
                if !v.check("a", j, ok, || {
                    json!({"symbol": &**f, "args": values_json(args), "original": want.to_json(),
                           "separated": got.map_or(serde_json::Value::Null, |g| g.to_json())})
                }) {
                    return v;
                }
            }
        }
        for g in a.vocabulary().dynamics().filter(|s| !separated.contains(&s.name)) {
            let ox: BTreeMap<_, _> = x.overrides(&g.name).collect();
            let oy: BTreeMap<_, _> = y.overrides(&g.name).collect();
            if !v.check("a", j, ox == oy, || json!({"symbol": &*g.name})) {
                return v;
            }
        }
        // (c)
        for (t, tt) in &rewritten {
            let vx = eval_result(&x, t, env);
            let vy = eval_result(&y, tt, env);
            let ok = match (&vx, &vy) {
                (Ok(p), Ok(q)) => p == q,
                (Err(Halt::Failed(p)), Err(Halt::Failed(q))) => failure_matches(p, q, cert),
                (Err(p), Err(q)) => p == q,
                _ => false,
            };
            if !v.check("c", j, ok, || {
                json!({"term": print_term(t), "original": format!("{vx:?}"), "separated": format!("{vy:?}")})
            }) {
                return v;
            }
        }

        if j >= budget || output_of(a, &x).is_some() {
            break;
        }

        let (x2, ra) = step(a, &x, env, j);
        let (y2, rb) = step(b, &y, env, j);

        // (b)
        let apps_a = applications(&ra.trace, &separated);
        let apps_b = applications(&rb.trace, &added);
        v.check("b", j, apps_a == apps_b, || {
            let only_a: Vec<String> = apps_a.difference(&apps_b).map(|(s, a)| format!("{s}{a:?}")).collect();
            let only_b: Vec<String> = apps_b.difference(&apps_a).map(|(s, a)| format!("{s}{a:?}")).collect();
            json!({"only_original": only_a, "only_separated": only_b})
        });

        // (d)
        for f in &separated {
            let tr = &cert.renaming[f];
            let s_args: BTreeSet<Vec<Value>> = rb
                .trace
                .accesses
                .iter()
                .filter(|acc| acc.kind == AccessKind::Intrinsic && acc.symbol == tr.s)
                .map(|acc| acc.args.clone())
                .collect();
            let f_args: BTreeSet<Vec<Value>> = ra
                .trace
                .args_of(f)
                .into_iter()
                .filter(|args| !updated.contains(&(f.clone(), args.clone())))
                .collect();
            touched.get_mut(f).unwrap().extend(ra.trace.args_of(f));
            v.check("d", j, s_args == f_args, || {
                json!({"symbol": &**f, "s_args": format!("{s_args:?}"), "f_not_updated": format!("{f_args:?}")})
            });
        }

        // (e)
        let same_kind = std::mem::discriminant(&ra.outcome) == std::mem::discriminant(&rb.outcome);
        let ok = same_kind
            && match (&ra.outcome, &rb.outcome) {
                (Outcome::Failed(p), Outcome::Failed(q)) => failure_matches(p, q, cert),
                (p, q) => p == q,
            };
        v.check("e", j, ok, || {
            json!({"original": outcome_json(&ra.outcome), "separated": outcome_json(&rb.outcome)})
        });
        if v.divergence.is_some() || ra.outcome != Outcome::Advanced {
            v.steps = j + 1;
            return v;
        }
        for u in ra.updates.iter() {
            updated.insert((u.location.symbol.clone(), u.location.args.clone()));
        }
        x = x2;
        y = y2;
        j += 1;
    }
    v.steps = j;
    if let Some(out) = output_of(a, &x) {
        let other = output_of(b, &y);
        v.check("output", j, other.as_ref() == Some(&out), || {
            json!({"original": out.to_json(), "separated": other.map(|o| o.to_json())})
        });
    }
    v
}
