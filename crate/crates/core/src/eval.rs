//! Term evaluation and rule firing.
//!
//! Evaluation is strict and left to right, except `ite`, which evaluates its
//! condition and then at most one branch. Every application of a basic
//! function (dynamic read, intrinsic static, extrinsic query) is recorded in
//! an [`EvalTrace`]; logic symbols and numerals are not.

use std::collections::BTreeSet;
use std::fmt;

use crate::state::{Location, State, UpdateSet};
use crate::structure::{Resolved, StaticValue};
use crate::syntax::{Rule, Term};
use crate::value::{fmt_args, Name, Value};
use crate::vocab::{LogicOp, Symbol};

/// Answers queries to extrinsic functions. `None` means the oracle never
/// replies.
pub trait Oracle {
    fn answer(&self, symbol: &Symbol, args: &[Value]) -> Option<Value>;
}

/// An oracle that never replies.
pub struct Silent;

impl Oracle for Silent {
    fn answer(&self, _: &Symbol, _: &[Value]) -> Option<Value> {
        None
    }
}

/// Why a step failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Failure {
    /// A partial basic function was evaluated where it is undefined.
    Undefined { symbol: Name, args: Vec<Value> },
    /// The update set contains two updates of one location with different
    /// values.
    Contradiction {
        location: Location,
        first: Value,
        second: Value,
    },
    /// A conditional guard produced a value other than true or false.
    GuardNotBoolean { guard: Term, value: Value },
}

impl Failure {
    pub fn class(&self) -> FailureClass {
        match self {
            Failure::Undefined { .. } => FailureClass::Undefined,
            Failure::Contradiction { .. } => FailureClass::Contradiction,
            Failure::GuardNotBoolean { .. } => FailureClass::GuardNotBoolean,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Undefined { symbol, args } => {
                write!(f, "`{symbol}` is undefined at {}", fmt_args(args))
            }
            Failure::Contradiction {
                location,
                first,
                second,
            } => write!(f, "contradictory updates of {location}: {first} vs {second}"),
            Failure::GuardNotBoolean { value, .. } => {
                write!(f, "guard evaluated to non-Boolean {value}")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FailureClass {
    Undefined,
    Contradiction,
    GuardNotBoolean,
}

/// Evaluation stopped: either a failure or an unanswered extrinsic query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Halt {
    Failed(Failure),
    Stuck { symbol: Name, args: Vec<Value> },
}

impl From<Failure> for Halt {
    fn from(f: Failure) -> Self {
        Halt::Failed(f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AccessKind {
    Dynamic,
    Intrinsic,
    Extrinsic,
}

/// One application of a basic function. `value` is `None` when the
/// application was undefined or unanswered.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Access {
    pub kind: AccessKind,
    pub symbol: Name,
    pub args: Vec<Value>,
    pub value: Option<Value>,
}

pub type Application = (Name, Vec<Value>);

/// Basic-function applications performed during an evaluation, in order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EvalTrace {
    pub accesses: Vec<Access>,
}

impl EvalTrace {
    pub fn new() -> EvalTrace {
        EvalTrace::default()
    }

    fn record(&mut self, kind: AccessKind, symbol: &Name, args: &[Value], value: Option<&Value>) {
        self.accesses.push(Access {
            kind,
            symbol: symbol.clone(),
            args: args.to_vec(),
            value: value.cloned(),
        });
    }

    fn set_of(&self, keep: impl Fn(&Access) -> bool) -> BTreeSet<Application> {
        self.accesses
            .iter()
            .filter(|a| keep(a))
            .map(|a| (a.symbol.clone(), a.args.clone()))
            .collect()
    }

    /// Static applications (intrinsic and extrinsic) as a set.
    pub fn static_evals(&self) -> BTreeSet<Application> {
        self.set_of(|a| a.kind != AccessKind::Dynamic)
    }

    pub fn extrinsic_queries(&self) -> BTreeSet<Application> {
        self.set_of(|a| a.kind == AccessKind::Extrinsic)
    }

    pub fn dynamic_reads(&self) -> BTreeSet<Application> {
        self.set_of(|a| a.kind == AccessKind::Dynamic)
    }

    /// Every basic-function application as a set.
    pub fn applications(&self) -> BTreeSet<Application> {
        self.set_of(|_| true)
    }

    /// Arguments at which `symbol` was applied.
    pub fn args_of(&self, symbol: &str) -> BTreeSet<Vec<Value>> {
        self.accesses
            .iter()
            .filter(|a| &*a.symbol == symbol)
            .map(|a| a.args.clone())
            .collect()
    }
}

/// Evaluates `term` in `state`.
pub fn eval_term(
    state: &State,
    term: &Term,
    oracle: &dyn Oracle,
    trace: &mut EvalTrace,
) -> Result<Value, Halt> {
    let (head, args) = match term {
        Term::Nat(n) => return Ok(Value::Nat(*n)),
        Term::App { head, args } => (head, args),
    };
    let resolved = state
        .structure
        .resolve(head)
        .unwrap_or_else(|| panic!("unresolved symbol `{head}`: terms must be checked first"));

    if let Resolved::Logic(LogicOp::Ite) = resolved {
        let c = eval_term(state, &args[0], oracle, trace)?;
        return match c {
            Value::True => eval_term(state, &args[1], oracle, trace),
            Value::False => eval_term(state, &args[2], oracle, trace),
            _ => Ok(Value::Nil),
        };
    }

    let mut vals = Vec::with_capacity(args.len());
    for a in args {
        vals.push(eval_term(state, a, oracle, trace)?);
    }

    match resolved {
        Resolved::Logic(op) => Ok(apply_logic(op, &vals)),
        Resolved::Builtin(b) => {
            let v = b.apply(&vals);
            trace.record(AccessKind::Intrinsic, head, &vals, Some(&v));
            Ok(v)
        }
        Resolved::Declared(sym) if sym.is_dynamic() => {
            let v = state.read(head, &vals);
            trace.record(AccessKind::Dynamic, head, &vals, Some(&v));
            Ok(v)
        }
        Resolved::Declared(sym) if sym.intrinsic => match state.structure.table_value(sym, &vals) {
            StaticValue::Defined(v) => {
                trace.record(AccessKind::Intrinsic, head, &vals, Some(&v));
                Ok(v)
            }
            StaticValue::Undefined => {
                trace.record(AccessKind::Intrinsic, head, &vals, None);
                Err(Halt::Failed(Failure::Undefined {
                    symbol: head.clone(),
                    args: vals,
                }))
            }
        },
        // An answer outside a relation's range is no answer.
        Resolved::Declared(sym) => match oracle
            .answer(sym, &vals)
            .filter(|v| !sym.relational || v.is_boolean())
        {
            Some(v) => {
                trace.record(AccessKind::Extrinsic, head, &vals, Some(&v));
                Ok(v)
            }
            None => {
                trace.record(AccessKind::Extrinsic, head, &vals, None);
                Err(Halt::Stuck {
                    symbol: head.clone(),
                    args: vals,
                })
            }
        },
    }
}

/// Boolean connectives treat anything other than `true` as not true.
fn apply_logic(op: LogicOp, vals: &[Value]) -> Value {
    match op {
        LogicOp::True => Value::True,
        LogicOp::False => Value::False,
        LogicOp::Nil => Value::Nil,
        LogicOp::Eq => Value::from_bool(vals[0] == vals[1]),
        LogicOp::And => Value::from_bool(vals[0].is_true() && vals[1].is_true()),
        LogicOp::Or => Value::from_bool(vals[0].is_true() || vals[1].is_true()),
        LogicOp::Not => Value::from_bool(!vals[0].is_true()),
        LogicOp::Ite => unreachable!("ite is lazy"),
    }
}

/// Fires `rule` at `state`, producing its (not yet checked) update set.
///
/// The left side `f(t1..tr)` of an assignment is never evaluated as a term;
/// only its arguments and the right side are.
pub fn fire(
    rule: &Rule,
    state: &State,
    oracle: &dyn Oracle,
    trace: &mut EvalTrace,
) -> Result<UpdateSet, Halt> {
    let mut out = UpdateSet::new();
    fire_into(rule, state, oracle, trace, &mut out)?;
    Ok(out)
}

fn fire_into(
    mut rule: &Rule,
    state: &State,
    oracle: &dyn Oracle,
    trace: &mut EvalTrace,
    out: &mut UpdateSet,
) -> Result<(), Halt> {
    // conditionals continue in a loop so long else-chains use no stack
    loop {
        match rule {
            Rule::Assign { head, args, rhs } => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(eval_term(state, a, oracle, trace)?);
                }
                let v = eval_term(state, rhs, oracle, trace)?;
                out.insert(Location::new(head.clone(), vals), v);
                return Ok(());
            }
            Rule::Cond {
                guard,
                then,
                otherwise,
            } => match eval_term(state, guard, oracle, trace)? {
                Value::True => rule = then,
                Value::False => rule = otherwise,
                value => {
                    return Err(Halt::Failed(Failure::GuardNotBoolean {
                        guard: guard.clone(),
                        value,
                    }))
                }
            },
            Rule::Par(rules) => {
                for r in rules {
                    fire_into(r, state, oracle, trace, out)?;
                }
                return Ok(());
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;
    use std::sync::Arc;

    use super::*;
    use crate::structure::{Structure, TablePart};
    use crate::value::name;

    fn structure() -> State {
        let mut s = Structure::default();
        s.datastructure.arithmetic = true;
        s.vocabulary.insert(Symbol::static_intrinsic("g", 1)).unwrap();
        s.vocabulary.insert(Symbol::dynamic("x", 0)).unwrap();
        s.vocabulary
            .insert(Symbol::dynamic("out", 0))
            .unwrap();
        s.tables.insert(
            name("g"),
            vec![TablePart::partial(BTreeMap::from([(vec![Value::Nat(1)], Value::Nat(5))]))],
        );
        State::new(Arc::new(s))
    }

    fn g(t: Term) -> Term {
        Term::app("g", vec![t])
    }

    #[test]
    fn ite_skips_unselected_branch() {
        let st = structure();
        let mut tr = EvalTrace::new();
        let t = Term::ite(Term::ff(), g(Term::Nat(0)), Term::tt());
        assert_eq!(eval_term(&st, &t, &Silent, &mut tr), Ok(Value::True));
        assert!(tr.args_of("g").is_empty());
    }

    #[test]
    fn ite_with_non_boolean_condition_is_nil() {
        let st = structure();
        let mut tr = EvalTrace::new();
        let t = Term::ite(Term::Nat(3), g(Term::Nat(0)), g(Term::Nat(0)));
        assert_eq!(eval_term(&st, &t, &Silent, &mut tr), Ok(Value::Nil));
        assert!(tr.accesses.is_empty());
    }

    #[test]
    fn equality_of_logic_constants() {
        let st = structure();
        let mut tr = EvalTrace::new();
        let t = Term::eq(Term::tt(), Term::ff());
        assert_eq!(eval_term(&st, &t, &Silent, &mut tr), Ok(Value::False));
    }

    #[test]
    fn partial_table_undefined_point() {
        let st = structure();
        let mut tr = EvalTrace::new();
        assert_eq!(
            eval_term(&st, &g(Term::Nat(0)), &Silent, &mut tr),
            Err(Halt::Failed(Failure::Undefined {
                symbol: name("g"),
                args: vec![Value::Nat(0)]
            }))
        );
        assert_eq!(eval_term(&st, &g(Term::Nat(1)), &Silent, &mut tr), Ok(Value::Nat(5)));
    }

    #[test]
    fn assignment_produces_single_update() {
        let st = structure();
        let r = Rule::assign("out", vec![], Term::tt());
        let us = fire(&r, &st, &Silent, &mut EvalTrace::new()).unwrap();
        let expected: UpdateSet = [(Location::new(name("out"), vec![]), Value::True)]
            .into_iter()
            .collect();
        assert_eq!(us, expected);
    }

    #[test]
    fn forced_guard() {
        let st = structure();
        let r = Rule::cond(
            Term::tt(),
            Rule::assign("x", vec![], Term::Nat(1)),
            Rule::assign("x", vec![], Term::Nat(2)),
        );
        let us = fire(&r, &st, &Silent, &mut EvalTrace::new()).unwrap();
        assert_eq!(us.iter().map(|u| u.value.clone()).collect::<Vec<_>>(), vec![Value::Nat(1)]);
    }

    #[test]
    fn parallel_keeps_inconsistent_pairs() {
        let st = structure();
        let r = Rule::Par(vec![
            Rule::assign("x", vec![], Term::Nat(1)),
            Rule::assign("x", vec![], Term::Nat(2)),
        ]);
        let us = fire(&r, &st, &Silent, &mut EvalTrace::new()).unwrap();
        assert_eq!(us.len(), 2);
        assert!(!us.is_consistent());
    }

    #[test]
    fn non_boolean_guard_fails() {
        let st = structure();
        let r = Rule::cond(Term::Nat(0), Rule::skip(), Rule::skip());
        assert!(matches!(
            fire(&r, &st, &Silent, &mut EvalTrace::new()),
            Err(Halt::Failed(Failure::GuardNotBoolean { .. }))
        ));
    }
}
