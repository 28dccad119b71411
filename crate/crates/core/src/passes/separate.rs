//! Separating the initial contents of a dynamic function from its updates.
//!
//! A dynamic `f` is replaced by a static `$s_f` holding f's initial
//! interpretation, a dynamic `$d_f` holding updated values, and a dynamic
//! relation `$delta_f` recording which locations were updated. Reads of
//! `f(t)` become `ite($delta_f(t), $d_f(t), $s_f(t))`.

use indexmap::IndexMap;
use serde_json::{json, Value as Json};
use thiserror::Error;

use crate::algorithm::Algorithm;
use crate::structure::TablePart;
use crate::syntax::{Rule, Term};
use crate::value::{name, Name};
use crate::vocab::{is_reserved, IoRole, Symbol};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PreconditionError {
    #[error("`{0}` is not declared")]
    Unknown(Name),
    #[error("`{0}` is static")]
    Static(Name),
    #[error("`{0}` is an input or output variable")]
    Io(Name),
    #[error("`{0}` is a reserved symbol")]
    Reserved(Name),
    #[error("fresh name `{0}` is already taken")]
    Taken(Name),
}

/// The three symbols replacing one dynamic function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triple {
    pub s: Name,
    pub d: Name,
    pub delta: Name,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationCert {
    pub renaming: IndexMap<Name, Triple>,
    pub algorithm: Algorithm,
}

impl SeparationCert {
    /// The term `t̃` of the transformed program for a term `t` of the
    /// original one.
    pub fn rewrite(&self, t: &Term) -> Term {
        self.renaming
            .iter()
            .fold(t.clone(), |acc, (f, tr)| rewrite_term(&acc, f, tr))
    }

    pub fn to_json(&self) -> Json {
        let map: serde_json::Map<String, Json> = self
            .renaming
            .iter()
            .map(|(f, t)| (f.to_string(), json!({"s": &*t.s, "d": &*t.d, "delta": &*t.delta})))
            .collect();
        json!({ "renaming": map })
    }
}

pub fn triple_for(f: &str) -> Triple {
    Triple {
        s: name(format!("$s_{f}")),
        d: name(format!("$d_{f}")),
        delta: name(format!("$delta_{f}")),
    }
}

/// Replaces every `f(u)` by `ite(delta(ũ), d(ũ), s(ũ))`, innermost first.
pub fn rewrite_term(t: &Term, f: &str, tr: &Triple) -> Term {
    t.map_bottom_up(&mut |node| match node {
        Term::App { head, args } if &*head == f => Term::ite(
            Term::App {
                head: tr.delta.clone(),
                args: args.clone(),
            },
            Term::App {
                head: tr.d.clone(),
                args: args.clone(),
            },
            Term::App {
                head: tr.s.clone(),
                args,
            },
        ),
        other => other,
    })
}

fn rewrite_rule(r: &Rule, f: &str, tr: &Triple) -> Rule {
    r.map_terms(&mut |t| rewrite_term(t, f, tr))
        .map_assigns(&mut |head, args, rhs| {
            if &**head == f {
                Rule::Par(vec![
                    Rule::Assign {
                        head: tr.d.clone(),
                        args: args.to_vec(),
                        rhs: rhs.clone(),
                    },
                    Rule::Assign {
                        head: tr.delta.clone(),
                        args: args.to_vec(),
                        rhs: Term::tt(),
                    },
                ])
            } else {
                Rule::Assign {
                    head: head.clone(),
                    args: args.to_vec(),
                    rhs: rhs.clone(),
                }
            }
        })
}

/// Replaces one dynamic function.
pub fn separate_one(alg: &Algorithm, f: &str) -> Result<SeparationCert, PreconditionError> {
    let sym = alg
        .vocabulary()
        .get(f)
        .ok_or_else(|| PreconditionError::Unknown(name(f)))?
        .clone();
    if sym.is_static {
        return Err(PreconditionError::Static(sym.name));
    }
    if sym.io != IoRole::None {
        return Err(PreconditionError::Io(sym.name));
    }
    if is_reserved(f) {
        return Err(PreconditionError::Reserved(sym.name));
    }
    let tr = triple_for(f);
    for n in [&tr.s, &tr.d, &tr.delta] {
        if !alg.is_fresh(n) {
            return Err(PreconditionError::Taken(n.clone()));
        }
    }

    let mut out = alg.clone();
    let init = out.init.shift_remove(f).unwrap_or_default();
    out.program = rewrite_rule(&alg.program, f, &tr);
    let st = out.structure_mut();
    st.vocabulary.remove(f);
    let mut s = Symbol::static_intrinsic(&*tr.s, sym.arity);
    let mut d = Symbol::dynamic(&*tr.d, sym.arity);
    s.relational = sym.relational;
    s.numerical = sym.numerical;
    d.relational = sym.relational;
    d.numerical = sym.numerical;
    let delta = Symbol::dynamic(&*tr.delta, sym.arity).relational();
    st.vocabulary.insert(s).expect("fresh");
    st.vocabulary.insert(d).expect("fresh");
    st.vocabulary.insert(delta).expect("fresh");
    st.tables.insert(
        tr.s.clone(),
        vec![TablePart {
            domain: None,
            entries: init,
            fallback: Some(sym.default_value()),
        }],
    );
    let mut renaming = IndexMap::new();
    renaming.insert(sym.name, tr);
    Ok(SeparationCert {
        renaming,
        algorithm: out,
    })
}

/// Symbols that `separate_all` replaces, in declaration order.
pub fn separable(alg: &Algorithm) -> Vec<Name> {
    alg.vocabulary()
        .dynamics()
        .filter(|s| s.io == IoRole::None && !is_reserved(&s.name))
        .map(|s| s.name.clone())
        .collect()
}

/// Replaces every non-input, non-output, non-reserved dynamic function.
pub fn separate_all(alg: &Algorithm) -> SeparationCert {
    separate_only(alg, &separable(alg)).expect("separable symbols satisfy the preconditions")
}

/// Replaces the listed dynamic functions in the given order.
pub fn separate_only(alg: &Algorithm, symbols: &[Name]) -> Result<SeparationCert, PreconditionError> {
    let mut cert = SeparationCert {
        renaming: IndexMap::new(),
        algorithm: alg.clone(),
    };
    for f in symbols {
        let step = separate_one(&cert.algorithm, f)?;
        cert.renaming.extend(step.renaming);
        cert.algorithm = step.algorithm;
    }
    Ok(cert)
}
