//! Normalization into a compound conditional of parallel assignments.

use crate::algorithm::Algorithm;
use crate::syntax::{par, Rule, Term};

/// One `[else]if guard then body` clause; the body holds assignments only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub guard: Term,
    pub body: Vec<Rule>,
}

/// An if/elseif cascade without a final else: the first clause whose guard
/// holds fires, and no clause firing means no updates.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CompoundConditional {
    pub clauses: Vec<Clause>,
}

impl CompoundConditional {
    pub fn to_rule(&self) -> Rule {
        self.clauses.iter().rev().fold(Rule::skip(), |rest, c| {
            Rule::cond(c.guard.clone(), par(c.body.clone()), rest)
        })
    }

    /// Whether every body is a parallel block of assignments.
    pub fn is_flat(&self) -> bool {
        self.clauses
            .iter()
            .all(|c| c.body.iter().all(|r| matches!(r, Rule::Assign { .. })))
    }
}

/// Sequential conjunction `ite(g, h, false)`: `h` is evaluated only when
/// `g` holds.
pub fn and_then(g: &Term, h: &Term) -> Term {
    if g.is_const("true") {
        return h.clone();
    }
    if h.is_const("true") {
        return g.clone();
    }
    Term::ite(g.clone(), h.clone(), Term::ff())
}

/// Clauses of `P ∥ Q`: for each P-clause `g_i ⇒ P_i`, the clauses
/// `g_i ∧ h_j ⇒ P_i ∥ Q_j` for every Q-clause, then `g_i ⇒ P_i`; finally
/// the Q-clauses themselves.
///
/// The first conjunction `g_i ∧ h_1` is the strict `and`: the original
/// evaluates `h_1` in every state, so evaluating it here adds nothing. Later
/// `h_j` are evaluated by the original only when `h_1..h_{j-1}` fail, so
/// those conjunctions are sequential and `h_j` is reached only after the
/// earlier clauses for `g_i` have been rejected.
pub fn merge_parallel(p: &CompoundConditional, q: &CompoundConditional) -> CompoundConditional {
    let mut clauses = Vec::new();
    for pc in &p.clauses {
        for (j, qc) in q.clauses.iter().enumerate() {
            let guard = if j == 0 {
                strict_and(&pc.guard, &qc.guard)
            } else {
                and_then(&pc.guard, &qc.guard)
            };
            let mut body = pc.body.clone();
            body.extend(qc.body.iter().cloned());
            clauses.push(Clause { guard, body });
        }
        clauses.push(pc.clone());
    }
    clauses.extend(q.clauses.iter().cloned());
    // clauses after an unconditional one are never reached
    if let Some(k) = clauses.iter().position(|c| c.guard.is_const("true")) {
        clauses.truncate(k + 1);
    }
    CompoundConditional { clauses }
}

/// `and(g, h)`, dropping a constant `true` operand.
fn strict_and(g: &Term, h: &Term) -> Term {
    if g.is_const("true") {
        return h.clone();
    }
    if h.is_const("true") {
        return g.clone();
    }
    Term::and(g.clone(), h.clone())
}

/// Rewrites `rule` into a compound conditional generating the same updates
/// and evaluating the same static functions at every state.
pub fn normalize(rule: &Rule) -> CompoundConditional {
    match rule {
        Rule::Assign { .. } => CompoundConditional {
            clauses: vec![Clause {
                guard: Term::tt(),
                body: vec![rule.clone()],
            }],
        },
        Rule::Par(rs) => rs
            .iter()
            .map(normalize)
            .reduce(|acc, n| merge_parallel(&acc, &n))
            .unwrap_or_default(),
        Rule::Cond {
            guard,
            then,
            otherwise,
        } => {
            let p = normalize(then);
            let q = normalize(otherwise);
            // With an unconditional then-clause, the else-clauses are only
            // reached when the guard is false.
            let p_total = p.clauses.iter().any(|c| c.guard.is_const("true"));
            let mut clauses = Vec::new();
            for c in &p.clauses {
                clauses.push(Clause {
                    guard: and_then(guard, &c.guard),
                    body: c.body.clone(),
                });
            }
            for c in &q.clauses {
                let g = if p_total {
                    c.guard.clone()
                } else if c.guard.is_const("true") {
                    Term::not(guard.clone())
                } else {
                    Term::ite(guard.clone(), Term::ff(), c.guard.clone())
                };
                clauses.push(Clause {
                    guard: g,
                    body: c.body.clone(),
                });
            }
            if clauses.is_empty() {
                // keep the guard's evaluation (and possible failure)
                clauses.push(Clause {
                    guard: Term::ite(guard.clone(), Term::ff(), Term::ff()),
                    body: Vec::new(),
                });
            }
            CompoundConditional { clauses }
        }
    }
}

/// Number of clauses `normalize(rule)` produces, computed without building
/// them. Saturates at `u64::MAX`.
pub fn clause_count(rule: &Rule) -> u64 {
    match rule {
        Rule::Assign { .. } => 1,
        Rule::Par(rs) => rs
            .iter()
            .map(clause_count)
            .reduce(|p, q| p.saturating_mul(q.saturating_add(1)).saturating_add(q))
            .unwrap_or(0),
        Rule::Cond { then, otherwise, .. } => {
            (clause_count(then).saturating_add(clause_count(otherwise))).max(1)
        }
    }
}

/// The algorithm with its program replaced by the normalized one.
pub fn normalize_algorithm(alg: &Algorithm) -> Algorithm {
    let mut out = alg.clone();
    out.program = normalize(&alg.program).to_rule();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: &str) -> Term {
        Term::constant(n)
    }

    fn a(x: &str) -> Rule {
        Rule::assign(x, vec![], Term::tt())
    }

    #[test]
    fn single_assignment() {
        let cc = normalize(&a("x"));
        assert_eq!(cc.clauses, vec![Clause { guard: Term::tt(), body: vec![a("x")] }]);
    }

    #[test]
    fn empty_left_operand_is_unit() {
        let q = normalize(&Rule::cond(c("h"), a("q"), Rule::skip()));
        assert_eq!(merge_parallel(&CompoundConditional::default(), &q), q);
        assert_eq!(merge_parallel(&q, &CompoundConditional::default()), q);
    }

    #[test]
    fn cascade_from_rules() {
        let r = Rule::cond(c("g1"), a("p1"), Rule::cond(c("g2"), a("p2"), Rule::skip()));
        let cc = normalize(&r);
        let guards: Vec<Term> = cc.clauses.iter().map(|cl| cl.guard.clone()).collect();
        assert_eq!(guards, vec![c("g1"), c("g2")]);
        let r = Rule::cond(c("b"), Rule::skip(), a("q"));
        assert_eq!(normalize(&r).clauses[0].guard, Term::not(c("b")));
    }

    #[test]
    fn five_clause_merge() {
        let cc = |cl: Vec<(Term, Vec<Rule>)>| CompoundConditional {
            clauses: cl.into_iter().map(|(guard, body)| Clause { guard, body }).collect(),
        };
        let p = cc(vec![(c("g1"), vec![a("p1")]), (c("g2"), vec![a("p2")])]);
        let q = cc(vec![(c("h1"), vec![a("q1")])]);
        let m = merge_parallel(&p, &q);
        let expected = cc(vec![
            (Term::and(c("g1"), c("h1")), vec![a("p1"), a("q1")]),
            (c("g1"), vec![a("p1")]),
            (Term::and(c("g2"), c("h1")), vec![a("p2"), a("q1")]),
            (c("g2"), vec![a("p2")]),
            (c("h1"), vec![a("q1")]),
        ]);
        assert_eq!(m, expected);
    }
}
