//! Per-state comparison of a rule with its normal form.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::algorithm::Algorithm;
use crate::eval::{fire, EvalTrace, Halt, Oracle};
use crate::passes::normalize::normalize;
use crate::state::{Location, State};
use crate::syntax::{Rule, Term};
use crate::value::{Name, Value};
use crate::vocab::Symbol;

use super::gen::{ENUM, ELEMENTS};
use super::Verdict;

/// Most combinations enumerated exhaustively before sampling takes over.
const ENUMERATION_LIMIT: usize = 64;

fn candidates(s: &Symbol) -> Vec<Value> {
    if s.relational {
        vec![Value::False, Value::True]
    } else if s.numerical {
        (0..3).map(Value::Nat).collect()
    } else {
        vec![Value::Nil, Value::Nat(0), Value::Nat(1), Value::True]
    }
}

fn arg_pool() -> Vec<Value> {
    let mut p: Vec<Value> = (0..3).map(Value::Nat).collect();
    p.push(Value::enum_elem(ENUM, ELEMENTS[0]));
    p
}

/// Nullary dynamic symbols read by some guard of `rule`.
fn guard_relevant(alg: &Algorithm, rule: &Rule) -> Vec<Symbol> {
    let mut out: Vec<Symbol> = Vec::new();
    rule.visit_rules(&mut |r| {
        if let Rule::Cond { guard, .. } = r {
            guard.visit(&mut |t| {
                if let Term::App { head, args } = t {
                    if let Some(s) = alg.vocabulary().get(head) {
                        if s.is_dynamic() && args.is_empty() && !out.iter().any(|o| o.name == s.name) {
                            out.push(s.clone());
                        }
                    }
                }
            });
        }
    });
    out
}

/// States for checking `rule`: every combination of small values for the
/// guard-relevant nullary dynamics (as far as the enumeration limit allows),
/// topped up with sampled states to at least `count`. Locations not
/// enumerated are filled at random.
pub fn enumerate_states(alg: &Algorithm, rule: &Rule, count: usize, seed: u64) -> Vec<State> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let relevant = guard_relevant(alg, rule);
    let mut enumerated: Vec<Symbol> = Vec::new();
    let mut combos = 1usize;
    for s in &relevant {
        let k = candidates(s).len();
        if combos * k > ENUMERATION_LIMIT {
            break;
        }
        combos *= k;
        enumerated.push(s.clone());
    }
    let fixed: Vec<Name> = enumerated.iter().map(|s| s.name.clone()).collect();
    let total = combos.max(count);
    let pool = arg_pool();
    let dynamics: Vec<Symbol> = alg.vocabulary().dynamics().cloned().collect();
    (0..total)
        .map(|i| {
            let mut st = State::new(alg.structure.clone());
            for s in &dynamics {
                if fixed.contains(&s.name) {
                    continue;
                }
                let vals = candidates(s);
                if s.arity == 0 {
                    let v = vals.choose(&mut rng).unwrap().clone();
                    st.write(&Location::new(s.name.clone(), vec![]), v);
                    continue;
                }
                for _ in 0..rng.gen_range(0..4) {
                    let args: Vec<Value> = (0..s.arity).map(|_| pool.choose(&mut rng).unwrap().clone()).collect();
                    let v = vals.choose(&mut rng).unwrap().clone();
                    st.write(&Location::new(s.name.clone(), args), v);
                }
            }
            // mixed-radix digits of i pick the enumerated values
            let mut rest = i % combos;
            for s in &enumerated {
                let vals = candidates(s);
                let v = vals[rest % vals.len()].clone();
                rest /= vals.len();
                st.write(&Location::new(s.name.clone(), vec![]), v);
            }
            st
        })
        .collect()
}

/// Compares the updates and the static-evaluation sets of `rule` and its
/// normal form at each state. States where either fails must fail for
/// both, with the same failure class.
pub fn verify_normalization(rule: &Rule, states: &[State], env: &dyn Oracle) -> Verdict {
    verify_equivalent(rule, &normalize(rule).to_rule(), states, env)
}

/// The per-state comparison behind [`verify_normalization`], for any
/// candidate rewriting `normal` of `rule`.
pub fn verify_equivalent(rule: &Rule, normal: &Rule, states: &[State], env: &dyn Oracle) -> Verdict {
    let mut v = Verdict::default();
    for (i, st) in states.iter().enumerate() {
        let mut t1 = EvalTrace::new();
        let mut t2 = EvalTrace::new();
        let r1 = fire(rule, st, env, &mut t1);
        let r2 = fire(normal, st, env, &mut t2);
        match (&r1, &r2) {
            (Ok(u1), Ok(u2)) => {
                v.check("updates", i, u1 == u2, || {
                    json!({"state": i, "original": format!("{u1:?}"), "normalized": format!("{u2:?}")})
                });
                let (s1, s2) = (t1.static_evals(), t2.static_evals());
                v.check("static-evals", i, s1 == s2, || {
                    json!({"state": i, "original": format!("{s1:?}"), "normalized": format!("{s2:?}")})
                });
            }
            (Err(h1), Err(h2)) => {
                let same = match (h1, h2) {
                    (Halt::Failed(a), Halt::Failed(b)) => a.class() == b.class(),
                    (Halt::Stuck { .. }, Halt::Stuck { .. }) => true,
                    _ => false,
                };
                v.check("failure", i, same, || {
                    json!({"state": i, "original": format!("{h1:?}"), "normalized": format!("{h2:?}")})
                });
            }
            _ => {
                v.check("failure", i, false, || {
                    json!({"state": i, "original": format!("{r1:?}"), "normalized": format!("{r2:?}")})
                });
            }
        }
        v.steps += 1;
        if v.divergence.is_some() {
            break;
        }
    }
    v
}
