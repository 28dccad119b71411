//! Serialization of extrinsic queries: a tight elaboration issuing at most
//! one extrinsic query per regular step.
//!
//! The output program has the shape
//!
//! ```text
//! if not($done) then
//!   if g_1 then R_1
//!   else if g_2 then R_2
//!   ...
//!   else R_n          // the only clause setting $done
//! else
//!   $done := false
//! ```
//!
//! where each clause is either pure (no extrinsic symbol) or tainted
//! (`d := e(args) ∥ b := true` with `e` extrinsic and nothing else
//! extrinsic).

use std::collections::BTreeSet;

use serde_json::{json, Value as Json};

use crate::algorithm::Algorithm;
use crate::passes::normalize::{and_then, normalize, CompoundConditional};
use crate::printer::print_term;
use crate::syntax::{Rule, Term};
use crate::value::{name, Name};
use crate::vocab::{LogicOp, Symbol, Vocabulary};

/// Whether `t` is an application of an extrinsic symbol of `v`.
pub fn is_extrinsic_head(v: &Vocabulary, t: &Term) -> bool {
    t.head()
        .and_then(|h| v.get(h))
        .is_some_and(Symbol::is_extrinsic)
}

pub fn mentions_extrinsic(v: &Vocabulary, t: &Term) -> bool {
    t.any(&|s| is_extrinsic_head(v, s))
}

pub fn rule_mentions_extrinsic(v: &Vocabulary, r: &Rule) -> bool {
    r.any_term(&|s| is_extrinsic_head(v, s))
}

fn collect_post_order(v: &Vocabulary, t: &Term, out: &mut Vec<Term>) {
    for a in t.args() {
        collect_post_order(v, a, out);
    }
    if is_extrinsic_head(v, t) && !out.contains(t) {
        out.push(t.clone());
    }
}

/// Distinct extrinsic-head terms, each listed after all of its extrinsic
/// subterms; ties go to the leftmost innermost occurrence.
pub fn order_extrinsic_terms(v: &Vocabulary, terms: &[&Term]) -> Vec<Term> {
    let mut out = Vec::new();
    for t in terms {
        collect_post_order(v, t, &mut out);
    }
    out
}

pub fn order_extrinsic_terms_in_rule(v: &Vocabulary, r: &Rule) -> Vec<Term> {
    let mut terms = Vec::new();
    r.visit_terms(&mut |t| terms.push(t));
    order_extrinsic_terms(v, &terms)
}

/// Rows `t_j^i` of the substitution matrix: row `i` has the first `i`
/// terms replaced by `d_1..d_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstitutionMatrix {
    pub d: Vec<Name>,
    pub rows: Vec<Vec<Term>>,
}

impl SubstitutionMatrix {
    /// `t_i^{i-1}`, the term stored into `d_i` (1-based `i`).
    pub fn query(&self, i: usize) -> &Term {
        &self.rows[i - 1][i - 1]
    }

    /// `Π^i` for the given target: the first `i` terms replaced.
    pub fn substitute_rule(&self, target: &Rule, upto: usize) -> Rule {
        (1..=upto).fold(target.clone(), |r, i| {
            let from = self.query(i).clone();
            let to = Term::constant(&*self.d[i - 1]);
            r.map_terms(&mut |t| t.replace(&from, &to))
        })
    }

    pub fn substitute_term(&self, target: &Term, upto: usize) -> Term {
        (1..=upto).fold(target.clone(), |t, i| {
            t.replace(self.query(i), &Term::constant(&*self.d[i - 1]))
        })
    }
}

pub fn build_matrix(terms: &[Term], d: &[Name]) -> SubstitutionMatrix {
    assert_eq!(terms.len(), d.len());
    let mut rows = vec![terms.to_vec()];
    for i in 1..=terms.len() {
        let prev = &rows[i - 1];
        let from = prev[i - 1].clone();
        let to = Term::constant(&*d[i - 1]);
        let row = prev.iter().map(|t| t.replace(&from, &to)).collect();
        rows.push(row);
    }
    SubstitutionMatrix {
        d: d.to_vec(),
        rows,
    }
}

/// A clause of the meaningful part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SerClause {
    pub guard: Term,
    pub body: Rule,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClauseKind {
    Pure,
    Tainted { d: Name, query: Term },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapeError {
    pub clause: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Serialized {
    pub algorithm: Algorithm,
    pub done: Name,
    /// Clauses of the meaningful part, in order.
    pub clauses: Vec<SerClause>,
    pub kinds: Vec<ClauseKind>,
    /// Upper bound on regular steps per mega-step, the resetting step
    /// included.
    pub bound: usize,
    /// Auxiliary symbols added to the vocabulary.
    pub aux: Vec<Name>,
}

impl Serialized {
    pub fn classification_json(&self) -> Json {
        let clauses: Vec<Json> = self
            .kinds
            .iter()
            .map(|k| match k {
                ClauseKind::Pure => json!({"kind": "pure"}),
                ClauseKind::Tainted { d, query } => {
                    json!({"kind": "tainted", "d": &**d, "query": print_term(query)})
                }
            })
            .collect();
        json!({
            "done": &*self.done,
            "bound": self.bound,
            "aux": self.aux.iter().map(|n| n.to_string()).collect::<Vec<_>>(),
            "clauses": clauses,
        })
    }
}

/// Builds stage `i` of a staged program given its done flag.
type StageFn<'s, B> = dyn FnMut(&mut B, usize, &Name) -> (Vec<SerClause>, usize) + 's;

struct Builder<'a> {
    alg: &'a Algorithm,
    taken: BTreeSet<Name>,
    aux: Vec<Symbol>,
}

impl Builder<'_> {
    fn fresh(&mut self, base: &str, first_plain: bool, relational: bool, numerical: bool) -> Name {
        let mut k = 1;
        let n = loop {
            let cand = if first_plain && k == 1 {
                name(base)
            } else {
                name(format!("{base}_{k}"))
            };
            if self.alg.is_fresh(&cand) && !self.taken.contains(&cand) {
                break cand;
            }
            k += 1;
        };
        self.taken.insert(n.clone());
        let mut s = Symbol::dynamic(&*n, 0);
        s.relational = relational;
        s.numerical = numerical;
        self.aux.push(s);
        n
    }

    fn flag(&mut self, base: &str) -> Name {
        self.fresh(base, false, true, false)
    }

    fn voc(&self) -> &Vocabulary {
        self.alg.vocabulary()
    }

    fn is_boolean(&self, t: &Term) -> bool {
        self.alg.is_boolean_term(t)
    }

    fn ser(&mut self, rule: &Rule, done: &Name) -> (Vec<SerClause>, usize) {
        if !rule_mentions_extrinsic(self.voc(), rule) {
            return (
                vec![SerClause {
                    guard: Term::tt(),
                    body: Rule::Par(vec![rule.clone(), set(done, true)]),
                }],
                1,
            );
        }
        match rule {
            Rule::Cond {
                guard,
                then,
                otherwise,
            } => {
                if guard.is_const("true") {
                    return self.ser(then, done);
                }
                if guard.is_const("false") {
                    return self.ser(otherwise, done);
                }
                if liftable_ite(self.voc(), guard).is_some() {
                    // evaluate the guard first, then branch on its value
                    let g = self.fresh("$g", false, true, false);
                    let stages = vec![
                        Rule::assign(&*g, vec![], guard.clone()),
                        Rule::cond(Term::constant(&*g), (**then).clone(), (**otherwise).clone()),
                    ];
                    return self.ser_stages(&stages, done);
                }
                self.ser_cond(guard, then, otherwise, done)
            }
            Rule::Par(rs) if rs.iter().all(|r| matches!(r, Rule::Assign { .. })) => {
                if rs.len() == 1 {
                    let Rule::Assign { args, rhs, .. } = &rs[0] else { unreachable!() };
                    let mut ts: Vec<&Term> = args.iter().collect();
                    ts.push(rhs);
                    if let Some(u) = ts.iter().find_map(|t| liftable_ite(self.voc(), t)) {
                        let lifted = self.lift(&u, &|v| rule.map_terms(&mut |t| t.replace(&u, v)));
                        return self.ser(&lifted, done);
                    }
                    return self.ser_basis(rule, done);
                }
                // evaluate each term holding a liftable ite into a temporary
                // of its own, then fire the block with the temporaries
                let mut stages = Vec::new();
                let mut block = Vec::new();
                for r in rs {
                    let Rule::Assign { head, args, rhs } = r else { unreachable!() };
                    let mut stage = |t: &Term| -> Term {
                        if liftable_ite(self.voc(), t).is_none() {
                            return t.clone();
                        }
                        let boolean = self.is_boolean(t);
                        let v = self.fresh("$v", false, boolean, false);
                        stages.push(Rule::assign(&*v, vec![], t.clone()));
                        Term::constant(&*v)
                    };
                    let args: Vec<Term> = args.iter().map(&mut stage).collect();
                    let rhs = stage(rhs);
                    block.push(Rule::Assign {
                        head: head.clone(),
                        args,
                        rhs,
                    });
                }
                if stages.is_empty() {
                    return self.ser_basis(rule, done);
                }
                stages.push(Rule::Par(block));
                self.ser_stages(&stages, done)
            }
            Rule::Assign { .. } => self.ser(&Rule::Par(vec![rule.clone()]), done),
            Rule::Par(_) => self.ser_compound(&normalize(rule), done),
        }
    }

    /// Case split on the condition of `u = ite(c, y, z)`, so that no branch
    /// holding an extrinsic term is evaluated in a state where the original
    /// would skip it.
    fn lift(&self, u: &Term, with: &dyn Fn(&Term) -> Rule) -> Rule {
        let (c, y, z) = (&u.args()[0], &u.args()[1], &u.args()[2]);
        if self.is_boolean(c) {
            Rule::cond(c.clone(), with(y), with(z))
        } else {
            Rule::cond(
                Term::eq(c.clone(), Term::tt()),
                with(y),
                Rule::cond(Term::eq(c.clone(), Term::ff()), with(z), with(&Term::nil())),
            )
        }
    }

    /// Runs `stages` one after another, each to completion. Every stage
    /// but the last writes auxiliary symbols only, so all of them see the
    /// state the mega-step started in.
    fn ser_stages(&mut self, stages: &[Rule], done: &Name) -> (Vec<SerClause>, usize) {
        self.ser_stages_with(stages.len(), &mut |b, i, d| b.ser(&stages[i], d), done, Vec::new())
    }

    fn ser_stages_with(
        &mut self,
        n: usize,
        stage: &mut StageFn<'_, Self>,
        done: &Name,
        mut reset: Vec<Rule>,
    ) -> (Vec<SerClause>, usize) {
        let mut clauses = Vec::new();
        let mut bound = 1;
        let mut prev: Option<Name> = None;
        reset.push(set(done, true));
        for i in 0..n {
            let d = self.flag("$done");
            let (cs, b) = stage(self, i, &d);
            let not_d = Term::not(Term::constant(&*d));
            let pre = match &prev {
                Some(p) => Term::and(Term::constant(&**p), not_d),
                None => not_d,
            };
            clauses.extend(cs.into_iter().map(|c| SerClause {
                guard: and_then(&pre, &c.guard),
                body: c.body,
            }));
            bound += b;
            reset.push(set(&d, false));
            prev = Some(d);
        }
        clauses.push(SerClause {
            guard: Term::tt(),
            body: Rule::Par(reset),
        });
        (clauses, bound)
    }

    /// An if/elseif cascade without nesting: one stage per guard records
    /// the first clause that holds in `$sel`, then a dispatch stage runs
    /// that clause's body. The bodies share a done flag, since only one of
    /// them runs.
    fn ser_compound(&mut self, cc: &CompoundConditional, done: &Name) -> (Vec<SerClause>, usize) {
        let whole = cc.to_rule();
        if !rule_mentions_extrinsic(self.voc(), &whole) {
            return self.ser(&whole, done);
        }
        if let [c] = &cc.clauses[..] {
            if c.guard.is_const("true") {
                return self.ser(&Rule::Par(c.body.clone()), done);
            }
        }
        let sel = self.fresh("$sel", false, false, true);
        let sel_t = Term::constant(&*sel);
        // consecutive pure guards share a scan stage, up to a cap that keeps
        // the cascade inside one stage shallow
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (i, c) in cc.clauses.iter().enumerate() {
            let pure = !mentions_extrinsic(self.voc(), &c.guard);
            match groups.last_mut() {
                Some(g) if pure && g.len() < SCAN_GROUP && !mentions_extrinsic(self.voc(), &cc.clauses[g[0]].guard) => {
                    g.push(i)
                }
                _ => groups.push(vec![i]),
            }
        }
        let scans: Vec<Rule> = groups
            .iter()
            .enumerate()
            .map(|(n, g)| {
                let pick = g.iter().rev().fold(Rule::skip(), |rest, &i| {
                    let set_sel = Rule::assign(&*sel, vec![], Term::Nat(i as u64 + 1));
                    Rule::cond(cc.clauses[i].guard.clone(), set_sel, rest)
                });
                if n == 0 {
                    pick
                } else {
                    Rule::cond(Term::eq(sel_t.clone(), Term::Nat(0)), pick, Rule::skip())
                }
            })
            .collect();
        let k = scans.len();
        let reset = vec![Rule::assign(&*sel, vec![], Term::Nat(0))];
        self.ser_stages_with(
            k + 1,
            &mut |b, i, d| {
                if i < k {
                    return b.ser(&scans[i], d);
                }
                let not_d = Term::not(Term::constant(&**d));
                let mut clauses = Vec::new();
                let mut bound = 1;
                for (j, c) in cc.clauses.iter().enumerate() {
                    let (cs, bj) = b.ser(&Rule::Par(c.body.clone()), d);
                    let pre = Term::and(Term::eq(sel_t.clone(), Term::Nat(j as u64 + 1)), not_d.clone());
                    clauses.extend(cs.into_iter().map(|c| SerClause {
                        guard: and_then(&pre, &c.guard),
                        body: c.body,
                    }));
                    bound = bound.max(bj);
                }
                // nothing selected
                clauses.push(SerClause {
                    guard: not_d,
                    body: set(d, true),
                });
                (clauses, bound)
            },
            done,
            reset,
        )
    }

    /// Query clauses `d_i := t_i^{i-1} ∥ b_i := true` under `pre ∧ ¬b_i`.
    fn query_phase(&mut self, terms: &[Term], pre: Option<&Term>) -> (SubstitutionMatrix, Vec<Name>, Vec<SerClause>) {
        let mut ds = Vec::new();
        let mut bs = Vec::new();
        for t in terms {
            let head = self.voc().get(t.head().unwrap()).unwrap().clone();
            let d = self.fresh("$d", false, head.relational, head.numerical);
            let k = &d[3..];
            let b = self.fresh_named(&format!("$b_{k}"));
            ds.push(d);
            bs.push(b);
        }
        let m = build_matrix(terms, &ds);
        let clauses = (1..=terms.len())
            .map(|i| {
                let not_b = Term::not(Term::constant(&*bs[i - 1]));
                SerClause {
                    guard: match pre {
                        Some(p) => Term::and(p.clone(), not_b),
                        None => not_b,
                    },
                    body: Rule::Par(vec![
                        Rule::assign(&*ds[i - 1], vec![], m.query(i).clone()),
                        set(&bs[i - 1], true),
                    ]),
                }
            })
            .collect();
        (m, bs, clauses)
    }

    fn fresh_named(&mut self, n: &str) -> Name {
        let n = if self.alg.is_fresh(n) && !self.taken.contains(n) {
            name(n)
        } else {
            return self.flag(n);
        };
        self.taken.insert(n.clone());
        self.aux.push(Symbol::dynamic(&*n, 0).relational());
        n
    }

    fn ser_basis(&mut self, rule: &Rule, done: &Name) -> (Vec<SerClause>, usize) {
        let terms = order_extrinsic_terms_in_rule(self.voc(), rule);
        let n = terms.len();
        let (m, bs, mut clauses) = self.query_phase(&terms, None);
        let mut last = vec![m.substitute_rule(rule, n), set(done, true)];
        last.extend(bs.iter().map(|b| set(b, false)));
        clauses.push(SerClause {
            guard: Term::tt(),
            body: Rule::Par(last),
        });
        (clauses, n + 1)
    }

    fn ser_cond(&mut self, beta: &Term, p: &Rule, q: &Rule, done: &Name) -> (Vec<SerClause>, usize) {
        let terms = order_extrinsic_terms(self.voc(), &[beta]);
        let n = terms.len();
        let a = self.flag("$a");
        let k = a[3..].to_string();
        let b = self.fresh_named(&format!("$beta_{k}"));
        let not_a = Term::not(Term::constant(&*a));
        let (m, bs, mut clauses) = self.query_phase(&terms, Some(&not_a));
        let mut eval = vec![
            Rule::assign(&*b, vec![], m.substitute_term(beta, n)),
            set(&a, true),
        ];
        eval.extend(bs.iter().map(|x| set(x, false)));
        clauses.push(SerClause {
            guard: not_a,
            body: Rule::Par(eval),
        });

        let done_p = self.flag("$done");
        let done_q = self.flag("$done");
        let (pc, bp) = self.ser(p, &done_p);
        let (qc, bq) = self.ser(q, &done_q);
        let a_t = Term::constant(&*a);
        let b_t = Term::constant(&*b);
        let gp = Term::and(Term::and(a_t.clone(), b_t.clone()), Term::not(Term::constant(&*done_p)));
        let gq = Term::and(Term::and(a_t, Term::not(b_t)), Term::not(Term::constant(&*done_q)));
        for c in pc {
            clauses.push(SerClause {
                guard: and_then(&gp, &c.guard),
                body: c.body,
            });
        }
        for c in qc {
            clauses.push(SerClause {
                guard: and_then(&gq, &c.guard),
                body: c.body,
            });
        }
        clauses.push(SerClause {
            guard: Term::tt(),
            body: Rule::Par(vec![
                set(done, true),
                set(&a, false),
                set(&done_p, false),
                set(&done_q, false),
            ]),
        });
        (clauses, n + 1 + bp.max(bq) + 1)
    }
}

fn set(var: &Name, v: bool) -> Rule {
    Rule::assign(&**var, vec![], if v { Term::tt() } else { Term::ff() })
}

/// First `ite` at an always-evaluated position of `t` (not inside another
/// `ite` branch) with an extrinsic term in one of its branches.
fn liftable_ite(v: &Vocabulary, t: &Term) -> Option<Term> {
    if let Term::App { head, args } = t {
        if LogicOp::from_name(head) == Some(LogicOp::Ite) {
            if mentions_extrinsic(v, &args[1]) || mentions_extrinsic(v, &args[2]) {
                return Some(t.clone());
            }
            return liftable_ite(v, &args[0]);
        }
        for a in args {
            if let Some(u) = liftable_ite(v, a) {
                return Some(u);
            }
        }
    }
    None
}

/// Builds `if g_1 then R_1 else if ... else R_n`; a final clause guarded by
/// `true` becomes the else branch.
pub fn cascade(clauses: &[SerClause]) -> Rule {
    let mut iter = clauses.iter().rev();
    let mut acc = match clauses.last() {
        Some(c) if c.guard.is_const("true") => {
            iter.next();
            c.body.clone()
        }
        _ => Rule::skip(),
    };
    for c in iter {
        acc = Rule::cond(c.guard.clone(), c.body.clone(), acc);
    }
    acc
}

/// Splits a cascade built by [`cascade`] back into clauses.
pub fn uncascade(rule: &Rule) -> Vec<SerClause> {
    let mut out = Vec::new();
    let mut r = rule;
    while let Rule::Cond {
        guard,
        then,
        otherwise,
    } = r
    {
        out.push(SerClause {
            guard: guard.clone(),
            body: (**then).clone(),
        });
        r = otherwise;
    }
    if !r.is_skip() {
        out.push(SerClause {
            guard: Term::tt(),
            body: r.clone(),
        });
    }
    out
}

/// Classifies one clause as pure or tainted.
pub fn classify(v: &Vocabulary, c: &SerClause) -> Result<ClauseKind, String> {
    let mut count = 0;
    let mut count_in = |t: &Term| t.visit(&mut |s| count += is_extrinsic_head(v, s) as usize);
    count_in(&c.guard);
    c.body.visit_terms(&mut count_in);
    if count == 0 {
        return Ok(ClauseKind::Pure);
    }
    if count > 1 {
        return Err(format!("{count} extrinsic occurrences"));
    }
    if mentions_extrinsic(v, &c.guard) {
        return Err("extrinsic occurrence in the guard".into());
    }
    let assigns: Vec<&Rule> = match &c.body {
        Rule::Par(rs) => rs.iter().collect(),
        other => vec![other],
    };
    for r in assigns {
        match r {
            Rule::Assign { head, args, rhs } if is_extrinsic_head(v, rhs) => {
                if !args.is_empty() || !v.get(head).is_some_and(Symbol::is_dynamic) {
                    return Err("query stored into a non-elementary location".into());
                }
                return Ok(ClauseKind::Tainted {
                    d: head.clone(),
                    query: rhs.clone(),
                });
            }
            Rule::Assign { .. } => {}
            _ => return Err("tainted clause body is not a parallel block of assignments".into()),
        }
    }
    Err("extrinsic occurrence is not a stored query".into())
}

/// Splits a serialized program `if not(done) then Π′ else done := false`
/// into `done` and the clauses of `Π′`.
pub fn split_program(program: &Rule) -> Option<(Name, Vec<SerClause>)> {
    let Rule::Cond {
        guard,
        then,
        otherwise,
    } = program
    else {
        return None;
    };
    let done = match guard {
        Term::App { head, args } if &**head == "not" => args[0].head()?.clone(),
        _ => return None,
    };
    match &**otherwise {
        Rule::Assign { head, args, rhs } if *head == done && args.is_empty() && rhs.is_const("false") => {}
        _ => return None,
    }
    Some((done, uncascade(then)))
}

/// Classifies every clause of a serialized program.
pub fn check_shape(alg: &Algorithm) -> Result<Vec<ClauseKind>, ShapeError> {
    let (done, clauses) = split_program(&alg.program).ok_or(ShapeError {
        clause: 0,
        reason: "program is not `if not(Done) then ... else Done := false`".into(),
    })?;
    let v = alg.vocabulary();
    let n = clauses.len();
    clauses
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let sets_done = c.body.assigned_symbols().contains(&done) || c.guard.mentions(&done);
            if sets_done != (i + 1 == n) {
                return Err(ShapeError {
                    clause: i,
                    reason: "only the last clause may mention Done".into(),
                });
            }
            classify(v, c).map_err(|reason| ShapeError { clause: i, reason })
        })
        .collect()
}

/// Most guards one scan stage tests.
const SCAN_GROUP: usize = 32;

/// Serializes `alg` (normalizing its program first).
pub fn serialize(alg: &Algorithm) -> Serialized {
    let mut b = Builder {
        alg,
        taken: BTreeSet::new(),
        aux: Vec::new(),
    };
    let done = b.fresh("$done", true, true, false);
    // a program without extrinsics is already one pure clause; normalizing
    // it would only make it bigger
    let (clauses, steps) = if rule_mentions_extrinsic(alg.vocabulary(), &alg.program) {
        b.ser_compound(&normalize(&alg.program), &done)
    } else {
        b.ser(&alg.program, &done)
    };
    let mut out = alg.clone();
    let aux: Vec<Name> = b.aux.iter().map(|s| s.name.clone()).collect();
    let st = out.structure_mut();
    for s in b.aux {
        st.vocabulary.insert(s).expect("fresh");
    }
    out.program = Rule::cond(
        Term::not(Term::constant(&*done)),
        cascade(&clauses),
        set(&done, false),
    );
    let kinds = clauses
        .iter()
        .map(|c| classify(out.vocabulary(), c).expect("construction yields corollary shape"))
        .collect();
    Serialized {
        algorithm: out,
        done,
        clauses,
        kinds,
        bound: steps + 1,
        aux,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    fn unit(program: &str) -> Algorithm {
        parse(&format!(
            "backend arithmetic\nfn e1/1 static extrinsic\nfn e2/1 static extrinsic\n\
             fn x/0\nfn y/0\nfn out/0 out\nprogram\n{program}"
        ))
        .unwrap()
    }

    #[test]
    fn subterms_come_first() {
        let a = unit("y := e2(e1(x))");
        let ts = order_extrinsic_terms_in_rule(a.vocabulary(), &a.program);
        let x = Term::constant("x");
        let e1 = Term::app("e1", vec![x]);
        assert_eq!(ts, vec![e1.clone(), Term::app("e2", vec![e1])]);
    }

    #[test]
    fn repeated_term_listed_once() {
        let a = unit("par { x := e1(0) ; y := e1(0) }");
        assert_eq!(order_extrinsic_terms_in_rule(a.vocabulary(), &a.program).len(), 1);
        let a = unit("x := y");
        assert!(order_extrinsic_terms_in_rule(a.vocabulary(), &a.program).is_empty());
    }

    #[test]
    fn matrix_rows() {
        let a = unit("y := e2(e1(x))");
        let ts = order_extrinsic_terms_in_rule(a.vocabulary(), &a.program);
        let m = build_matrix(&ts, &[name("$d_1"), name("$d_2")]);
        assert_eq!(m.rows[1][1], Term::app("e2", vec![Term::constant("$d_1")]));
        assert_eq!(m.rows[2], vec![Term::constant("$d_1"), Term::constant("$d_2")]);
        let last = m.substitute_rule(&a.program, 2);
        assert!(!rule_mentions_extrinsic(a.vocabulary(), &last));
    }

    #[test]
    fn pure_program_single_clause() {
        let s = serialize(&unit("x := y"));
        assert_eq!(s.bound, 2);
        assert_eq!(s.kinds, vec![ClauseKind::Pure]);
        assert!(s.algorithm.check(true).is_ok());
    }

    #[test]
    fn two_queries_two_tainted_clauses() {
        let s = serialize(&unit("y := e2(e1(x))"));
        let tainted = s.kinds.iter().filter(|k| matches!(k, ClauseKind::Tainted { .. })).count();
        assert_eq!(tainted, 2);
        assert_eq!(s.bound, 4);
        assert_eq!(check_shape(&s.algorithm).unwrap(), s.kinds);
        let printed = crate::printer::print(&s.algorithm);
        assert_eq!(parse(&printed).unwrap(), s.algorithm);
    }
}
