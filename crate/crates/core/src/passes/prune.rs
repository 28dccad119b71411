//! Pruning: inlining the effective oracles of a closed bundle into one
//! numerical algorithm without extrinsic functions.
//!
//! Every member runs in sessions. A session is a fresh copy of the member's
//! dynamic functions, selected by an extra first argument `$n`. Calls push a
//! new session onto an explicit stack:
//!
//! - `$top` is the stack height and `$max` the largest session number used;
//! - `$active(l)` is the member running at level `l`;
//! - `$top_of(s)` is the level session `s` runs at, `$ret(s)` the session
//!   to return to, and `$to(s)` the value returned to session `s`.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::algorithm::Algorithm;
use crate::bundle::AlgorithmBundle;
use crate::passes::separate::separate_all;
use crate::passes::serialize::{check_shape, serialize, split_program, ClauseKind, SerClause, ShapeError};
use crate::structure::{union_structures, InconsistencyError, Structure};
use crate::syntax::{Rule, Term};
use crate::value::{name, Name};
use crate::vocab::{IoRole, Symbol, Vocabulary};

pub const TOP: &str = "$top";
pub const SESSION: &str = "$n";
pub const MAX: &str = "$max";
pub const ACTIVE: &str = "$active";
pub const TOP_OF: &str = "$top_of";
pub const RET: &str = "$ret";
pub const TO: &str = "$to";
pub const INITIALIZED: &str = "$initialized";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PruneError {
    #[error("member {member} is not in serialized shape (clause {}): {}", .error.clause, .error.reason)]
    Shape { member: usize, error: ShapeError },
    #[error(transparent)]
    Inconsistent(#[from] InconsistencyError),
    #[error("name `{0}` is needed by the pruned algorithm but already taken")]
    Taken(Name),
    #[error("entry member has no output variable")]
    NoOutput,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PruneOptions {
    /// Members are already in serialized shape; skip normalize + serialize.
    pub assume_serialized: bool,
    /// Return to the caller after the callee's first mega-step, as in the
    /// literal construction, instead of when its output exists. Not
    /// objective-preserving in general.
    pub return_on_first_done: bool,
}

/// Where member `i`'s pieces live in the pruned algorithm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemberLayout {
    pub inputs: Vec<Name>,
    pub output: Name,
    pub done: Name,
    /// Session-indexed call flags, one per covered tainted clause.
    pub calls: Vec<Name>,
    /// Original dynamic symbol → session-indexed copy.
    pub renaming: BTreeMap<Name, Name>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pruned {
    pub algorithm: Algorithm,
    pub layouts: Vec<MemberLayout>,
}

/// Name of member `i`'s session-indexed copy of `f`.
pub fn session_name(i: usize, f: &str) -> Name {
    name(format!("$m{i}_{f}"))
}

fn n() -> Term {
    Term::constant(SESSION)
}

fn at(f: &str, arg: Term) -> Term {
    Term::app(f, vec![arg])
}

/// Every dynamic `d(x̄)` in the renaming becomes `renaming[d](n, x̄)`.
pub fn sessionize(rule: &Rule, renaming: &BTreeMap<Name, Name>) -> Rule {
    rule.map_terms(&mut |t| sessionize_term(t, renaming))
        .map_assigns(&mut |head, args, rhs| {
            let (head, args) = match renaming.get(head) {
                Some(h) => {
                    let mut a = vec![n()];
                    a.extend(args.iter().cloned());
                    (h.clone(), a)
                }
                None => (head.clone(), args.to_vec()),
            };
            Rule::Assign {
                head,
                args,
                rhs: rhs.clone(),
            }
        })
}

pub fn sessionize_term(t: &Term, renaming: &BTreeMap<Name, Name>) -> Term {
    t.map_bottom_up(&mut |node| match node {
        Term::App { head, args } => match renaming.get(&head) {
            Some(h) => {
                let mut a = vec![n()];
                a.extend(args);
                Term::App { head: h.clone(), args: a }
            }
            None => Term::App { head, args },
        },
        other => other,
    })
}

/// The two-step administrative program replacing the query
/// `d(n) := e(τ̄)` of a tainted clause whose other assignments are `rest`.
#[allow(clippy::too_many_arguments)]
pub fn install_call(
    d: &Name,
    d_relational: bool,
    query_args: &[Term],
    rest: Vec<Rule>,
    callee: usize,
    callee_inputs: &[(Name, bool)],
    flag: &Name,
) -> Rule {
    let top1 = Term::succ(Term::constant(TOP));
    let max1 = Term::succ(Term::constant(MAX));
    let mut call = vec![
        Rule::assign(TOP, vec![], top1.clone()),
        Rule::assign(ACTIVE, vec![top1.clone()], Term::Nat(callee as u64)),
        Rule::assign(SESSION, vec![], max1.clone()),
        Rule::assign(MAX, vec![], max1.clone()),
        Rule::assign(TOP_OF, vec![max1.clone()], top1),
    ];
    for ((input, relational), tau) in callee_inputs.iter().zip(query_args) {
        let rhs = if *relational {
            Term::eq(tau.clone(), Term::tt())
        } else {
            tau.clone()
        };
        call.push(Rule::assign(&**input, vec![max1.clone()], rhs));
    }
    call.push(Rule::assign(RET, vec![max1], n()));
    call.push(Rule::assign(&**flag, vec![n()], Term::tt()));

    let answer = if d_relational {
        Term::eq(at(TO, n()), Term::tt())
    } else {
        at(TO, n())
    };
    let mut resume = vec![Rule::assign(&**d, vec![n()], answer)];
    resume.extend(rest);
    resume.push(Rule::assign(&**flag, vec![n()], Term::ff()));

    Rule::cond(
        Term::not(at(flag, n())),
        Rule::Par(call),
        Rule::cond(
            Term::eq(at(TOP_OF, n()), Term::constant(TOP)),
            Rule::Par(resume),
            Rule::skip(),
        ),
    )
}

/// `Π^+`, which resets Done between mega-steps and returns to the
/// caller once the output exists.
pub fn install_return(body: Rule, done: &Name, output: &Name, return_on_first_done: bool) -> Rule {
    let ret = Rule::Par(vec![
        Rule::assign(TOP, vec![], Term::pred(Term::constant(TOP))),
        Rule::assign(SESSION, vec![], at(RET, n())),
        Rule::assign(TO, vec![at(RET, n())], at(output, n())),
    ]);
    let otherwise = if return_on_first_done {
        ret
    } else {
        Rule::cond(
            Term::eq(at(output, n()), Term::nil()),
            Rule::assign(&**done, vec![n()], Term::ff()),
            ret,
        )
    };
    Rule::cond(Term::not(at(done, n())), body, otherwise)
}

struct Prepared {
    alg: Algorithm,
    done: Name,
    clauses: Vec<SerClause>,
    kinds: Vec<ClauseKind>,
}

fn prepare(i: usize, alg: &Algorithm, opts: PruneOptions) -> Result<Prepared, PruneError> {
    let alg = if alg.init.is_empty() {
        alg.clone()
    } else {
        // sessions start uninformative, so initial contents move into statics
        separate_all(alg).algorithm
    };
    if opts.assume_serialized {
        let kinds = check_shape(&alg).map_err(|error| PruneError::Shape { member: i, error })?;
        let (done, clauses) = split_program(&alg.program).expect("checked shape");
        Ok(Prepared {
            alg,
            done,
            clauses,
            kinds,
        })
    } else {
        let s = serialize(&alg);
        Ok(Prepared {
            alg: s.algorithm,
            done: s.done,
            clauses: s.clauses,
            kinds: s.kinds,
        })
    }
}

/// The static part of a member: its datastructure, intrinsic statics, and
/// the extrinsics that stay genuine.
fn static_projection(alg: &Algorithm, passthrough: &BTreeSet<Name>) -> Structure {
    let mut st = (*alg.structure).clone();
    let drop: Vec<Name> = st
        .vocabulary
        .iter()
        .filter(|s| s.is_dynamic() || (s.is_extrinsic() && !passthrough.contains(&s.name)))
        .map(|s| s.name.clone())
        .collect();
    for d in drop {
        st.vocabulary.remove(&d);
    }
    st
}

pub fn prune(bundle: &AlgorithmBundle) -> Result<Pruned, PruneError> {
    prune_with(bundle, PruneOptions::default())
}

pub fn prune_with(bundle: &AlgorithmBundle, opts: PruneOptions) -> Result<Pruned, PruneError> {
    let prepared: Vec<Prepared> = bundle
        .members
        .iter()
        .enumerate()
        .map(|(i, m)| prepare(i, &m.algorithm, opts))
        .collect::<Result<_, _>>()?;

    let statics: Vec<Structure> = prepared
        .iter()
        .map(|p| static_projection(&p.alg, &bundle.passthrough))
        .collect();
    let mut st = union_structures(&statics)?;
    st.datastructure.arithmetic = true;

    let add = |st: &mut Structure, s: Symbol| -> Result<(), PruneError> {
        let taken = st.resolve(&s.name).is_some();
        if taken {
            return Err(PruneError::Taken(s.name));
        }
        st.vocabulary.insert(s).expect("checked fresh");
        Ok(())
    };

    // session-indexed copies of every member's dynamics
    let mut layouts = Vec::new();
    for (i, p) in prepared.iter().enumerate() {
        let v = p.alg.vocabulary();
        let mut renaming = BTreeMap::new();
        for s in v.dynamics() {
            let copy = session_name(i, &s.name);
            let mut c = Symbol::dynamic(&*copy, s.arity + 1);
            c.relational = s.relational;
            c.numerical = s.numerical;
            add(&mut st, c)?;
            renaming.insert(s.name.clone(), copy);
        }
        let output = match v.output() {
            Some(o) => renaming[&o.name].clone(),
            None if i == 0 => return Err(PruneError::NoOutput),
            // never called, never returns
            None => name(""),
        };
        layouts.push(MemberLayout {
            inputs: v.inputs().iter().map(|s| renaming[&s.name].clone()).collect(),
            output,
            done: renaming[&p.done].clone(),
            calls: Vec::new(),
            renaming,
        });
    }

    for s in [
        Symbol::dynamic(TOP, 0).numerical(),
        Symbol::dynamic(SESSION, 0).numerical(),
        Symbol::dynamic(MAX, 0).numerical(),
        Symbol::dynamic(ACTIVE, 1).numerical(),
        Symbol::dynamic(TOP_OF, 1).numerical(),
        Symbol::dynamic(RET, 1).numerical(),
        Symbol::dynamic(TO, 1),
        Symbol::dynamic(INITIALIZED, 0).relational(),
    ] {
        add(&mut st, s)?;
    }

    // B's own inputs and output, named after the entry member's
    let entry = prepared[0].alg.vocabulary();
    let entry_inputs: Vec<Symbol> = entry.inputs().into_iter().cloned().collect();
    let entry_output = entry.output().cloned().ok_or(PruneError::NoOutput)?;
    for s in entry_inputs.iter().chain([&entry_output]) {
        add(&mut st, s.clone())?;
    }

    let input_kinds: Vec<Vec<(Name, bool)>> = prepared
        .iter()
        .zip(&layouts)
        .map(|(p, l)| {
            p.alg
                .vocabulary()
                .inputs()
                .iter()
                .zip(&l.inputs)
                .map(|(s, copy)| (copy.clone(), s.relational))
                .collect()
        })
        .collect();

    let mut toil = Vec::new();
    for (i, p) in prepared.iter().enumerate() {
        let v = p.alg.vocabulary();
        let mut clauses = Vec::new();
        for (k, (c, kind)) in p.clauses.iter().zip(&p.kinds).enumerate() {
            let guard = sessionize_term(&c.guard, &layouts[i].renaming);
            let body = match kind {
                ClauseKind::Tainted { d, query } => {
                    let e = query.head().expect("application");
                    match bundle.coverage.get(e) {
                        Some(&j) => {
                            let flag = name(format!("$call{i}_{k}"));
                            add(&mut st, Symbol::dynamic(&*flag, 1).relational())?;
                            layouts[i].calls.push(flag.clone());
                            let rest: Vec<Rule> = match &c.body {
                                Rule::Par(rs) => rs.clone(),
                                other => vec![other.clone()],
                            }
                            .into_iter()
                            .filter(|r| !matches!(r, Rule::Assign { head, .. } if head == d))
                            .map(|r| sessionize(&r, &layouts[i].renaming))
                            .collect();
                            let args: Vec<Term> = query
                                .args()
                                .iter()
                                .map(|t| sessionize_term(t, &layouts[i].renaming))
                                .collect();
                            let d_rel = v.get(d).is_some_and(|s| s.relational);
                            install_call(
                                &layouts[i].renaming[d],
                                d_rel,
                                &args,
                                rest,
                                j,
                                &input_kinds[j],
                                &flag,
                            )
                        }
                        // passthrough oracle: the query stays
                        None => sessionize(&c.body, &layouts[i].renaming),
                    }
                }
                ClauseKind::Pure => sessionize(&c.body, &layouts[i].renaming),
            };
            clauses.push(SerClause { guard, body });
        }
        let body = crate::passes::serialize::cascade(&clauses);
        let plus = install_return(body, &layouts[i].done, &layouts[i].output, opts.return_on_first_done);
        toil.push(Rule::cond(
            Term::eq(at(ACTIVE, Term::constant(TOP)), Term::Nat(i as u64)),
            plus,
            Rule::skip(),
        ));
    }

    let mut initialize: Vec<Rule> = entry_inputs
        .iter()
        .zip(&layouts[0].inputs)
        .map(|(s, copy)| Rule::assign(&**copy, vec![Term::Nat(0)], Term::constant(&*s.name)))
        .collect();
    initialize.push(Rule::assign(INITIALIZED, vec![], Term::tt()));
    let out0 = Term::app(&*layouts[0].output, vec![Term::Nat(0)]);
    let finish = Rule::assign(&*entry_output.name, vec![], out0.clone());

    let program = Rule::cond(
        Term::not(Term::constant(INITIALIZED)),
        Rule::Par(initialize),
        Rule::cond(Term::eq(out0, Term::nil()), Rule::Par(toil), finish),
    );
    // keep B's inputs and output first, in their original order
    let mut ordered = Vocabulary::new();
    for s in entry_inputs.iter().chain([&entry_output]) {
        ordered.insert(s.clone()).expect("distinct");
    }
    for s in st.vocabulary.iter() {
        if s.io == IoRole::None {
            ordered.insert(s.clone()).expect("distinct");
        }
    }
    st.vocabulary = ordered;
    Ok(Pruned {
        algorithm: Algorithm::new(st, program),
        layouts,
    })
}
