//! Algorithms (source units): vocabulary, datastructure, static tables,
//! initial contents of dynamic functions and the program.

use std::collections::BTreeMap;
use std::sync::Arc;

use indexmap::IndexMap;
use thiserror::Error;

use crate::state::{Location, State};
use crate::structure::{Resolved, Structure, TablePart};
use crate::syntax::{Rule, Term};
use crate::value::{Name, Value};
use crate::vocab::{is_reserved, IoRole, LogicOp, Symbol, Vocabulary};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(Name),
    #[error("`{symbol}` expects {expected} argument(s), found {found}")]
    Arity {
        symbol: Name,
        expected: usize,
        found: usize,
    },
    #[error("assignment target `{0}` is not a dynamic function")]
    NotDynamic(Name),
    #[error("guard `{0}` is not a Boolean term")]
    NonBooleanGuard(String),
    #[error("relational `{0}` is assigned a term that is not Boolean")]
    NonBooleanAssignment(Name),
    #[error("`{0}` uses the reserved `$` namespace")]
    Reserved(Name),
    #[error("`{0}` is a logic or backend symbol and cannot be declared")]
    Builtin(Name),
    #[error("duplicate declaration of `{0}`")]
    Duplicate(Name),
    #[error("input/output declaration error: {0}")]
    Io(String),
    #[error("table for `{symbol}`: {reason}")]
    Table { symbol: Name, reason: String },
    #[error("initial contents for `{symbol}`: {reason}")]
    Init { symbol: Name, reason: String },
    #[error("numeral {0} used without the arithmetic backend")]
    NoArithmetic(u64),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InputError {
    #[error("expected {expected} input value(s), got {found}")]
    Count { expected: usize, found: usize },
    #[error("input value {0} is not an element of the base set")]
    OutsideBaseSet(Value),
    #[error("input `{0}` is relational but got non-Boolean {1}")]
    NotBoolean(Name, Value),
}

/// A sequential ASM that computes a function: its static structure, the
/// non-default initial contents of dynamic functions, and its program.
///
/// This is also the unit of the textual format: `parse` produces one and
/// `print` renders one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algorithm {
    pub structure: Arc<Structure>,
    /// Initial contents of (non-input) dynamic functions that differ from
    /// the default. Empty for algorithms satisfying the uninformativeness
    /// proviso.
    pub init: IndexMap<Name, BTreeMap<Vec<Value>, Value>>,
    pub program: Rule,
}

pub type SourceUnit = Algorithm;

impl Algorithm {
    pub fn new(structure: Structure, program: Rule) -> Algorithm {
        Algorithm {
            structure: Arc::new(structure),
            init: IndexMap::new(),
            program,
        }
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.structure.vocabulary
    }

    pub fn structure_mut(&mut self) -> &mut Structure {
        Arc::make_mut(&mut self.structure)
    }

    pub fn inputs(&self) -> Vec<&Symbol> {
        self.vocabulary().inputs()
    }

    pub fn output(&self) -> Option<&Symbol> {
        self.vocabulary().output()
    }

    /// Builds the initial state for the given input values.
    pub fn initial_state(&self, inputs: &[Value]) -> Result<State, InputError> {
        let ins = self.inputs();
        if ins.len() != inputs.len() {
            return Err(InputError::Count {
                expected: ins.len(),
                found: inputs.len(),
            });
        }
        let mut st = State::new(self.structure.clone());
        for (sym, entries) in &self.init {
            for (args, v) in entries {
                st.write(&Location::new(sym.clone(), args.clone()), v.clone());
            }
        }
        for (sym, v) in ins.iter().zip(inputs) {
            if !self.structure.datastructure.contains(v) {
                return Err(InputError::OutsideBaseSet(v.clone()));
            }
            if sym.relational && !v.is_boolean() {
                return Err(InputError::NotBoolean(sym.name.clone(), v.clone()));
            }
            st.write(&Location::new(sym.name.clone(), vec![]), v.clone());
        }
        Ok(st)
    }

    /// A symbol name not yet used by the vocabulary or the datastructure.
    pub fn is_fresh(&self, symbol: &str) -> bool {
        self.structure.resolve(symbol).is_none()
    }

    /// Static well-formedness. `allow_reserved` admits `$`-prefixed names,
    /// which only transformation passes introduce.
    pub fn check(&self, allow_reserved: bool) -> Result<(), CheckError> {
        let s = &*self.structure;
        let builtins = s.datastructure.builtin_names();
        {
            let mut seen = std::collections::BTreeSet::new();
            for b in &builtins {
                if LogicOp::from_name(b).is_some() || !seen.insert(b.clone()) {
                    return Err(CheckError::Builtin(b.clone()));
                }
            }
        }
        for sym in s.vocabulary.iter() {
            if LogicOp::from_name(&sym.name).is_some() || builtins.contains(&sym.name) {
                return Err(CheckError::Builtin(sym.name.clone()));
            }
            if !allow_reserved && is_reserved(&sym.name) {
                return Err(CheckError::Reserved(sym.name.clone()));
            }
        }
        self.check_io()?;
        self.check_tables()?;
        self.check_init()?;
        self.check_rule(&self.program)
    }

    fn check_io(&self) -> Result<(), CheckError> {
        let v = self.vocabulary();
        let mut positions = Vec::new();
        let mut outputs = 0;
        for sym in v.iter() {
            match sym.io {
                IoRole::None => continue,
                IoRole::Input(p) => positions.push(p),
                IoRole::Output => {
                    outputs += 1;
                    if sym.relational || sym.numerical {
                        return Err(CheckError::Io(format!(
                            "output variable `{}` must default to nil (neither relational nor numeric)",
                            sym.name
                        )));
                    }
                }
            }
            if sym.arity != 0 || sym.is_static {
                return Err(CheckError::Io(format!(
                    "`{}` must be a nullary dynamic symbol",
                    sym.name
                )));
            }
        }
        if outputs > 1 {
            return Err(CheckError::Io("more than one output variable".into()));
        }
        positions.sort_unstable();
        if positions.iter().enumerate().any(|(i, p)| i != *p) {
            return Err(CheckError::Io(
                "input positions must be 0, 1, ... without gaps or repeats".into(),
            ));
        }
        Ok(())
    }

    fn check_value(&self, v: &Value) -> bool {
        self.structure.datastructure.contains(v)
    }

    fn check_tables(&self) -> Result<(), CheckError> {
        let s = &*self.structure;
        for (name, parts) in &s.tables {
            let err = |reason: &str| CheckError::Table {
                symbol: name.clone(),
                reason: reason.to_string(),
            };
            let sym = s.vocabulary.get(name).ok_or_else(|| err("symbol is not declared"))?;
            if !sym.is_static || !sym.intrinsic {
                return Err(err("only intrinsic static symbols have tables"));
            }
            for TablePart {
                entries, fallback, ..
            } in parts
            {
                for args in entries.keys() {
                    if args.len() != sym.arity {
                        return Err(err("entry has the wrong number of arguments"));
                    }
                    if !args.iter().all(|a| self.check_value(a)) {
                        return Err(err("value outside the base set"));
                    }
                }
                for val in entries.values().chain(fallback.iter()) {
                    if !self.check_value(val) {
                        return Err(err("value outside the base set"));
                    }
                    if sym.relational && !val.is_boolean() {
                        return Err(err("relational symbol with a non-Boolean value"));
                    }
                    if sym.numerical && val.as_nat().is_none() {
                        return Err(err("numeric symbol with a non-natural value"));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_init(&self) -> Result<(), CheckError> {
        for (name, entries) in &self.init {
            let err = |reason: &str| CheckError::Init {
                symbol: name.clone(),
                reason: reason.to_string(),
            };
            let sym = self
                .vocabulary()
                .get(name)
                .ok_or_else(|| err("symbol is not declared"))?;
            if !sym.is_dynamic() {
                return Err(err("only dynamic functions have initial contents"));
            }
            if sym.io != IoRole::None {
                return Err(err("input and output variables cannot be initialized"));
            }
            for (args, v) in entries {
                if args.len() != sym.arity {
                    return Err(err("entry has the wrong number of arguments"));
                }
                if !args.iter().all(|a| self.check_value(a)) || !self.check_value(v) {
                    return Err(err("value outside the base set"));
                }
                if sym.relational && !v.is_boolean() {
                    return Err(err("relational symbol with a non-Boolean value"));
                }
            }
        }
        Ok(())
    }

    fn check_term(&self, t: &Term) -> Result<(), CheckError> {
        match t {
            Term::Nat(n) => {
                if self.structure.datastructure.arithmetic {
                    Ok(())
                } else {
                    Err(CheckError::NoArithmetic(*n))
                }
            }
            Term::App { head, args } => {
                let r = self
                    .structure
                    .resolve(head)
                    .ok_or_else(|| CheckError::UnknownSymbol(head.clone()))?;
                if r.arity() != args.len() {
                    return Err(CheckError::Arity {
                        symbol: head.clone(),
                        expected: r.arity(),
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|a| self.check_term(a))
            }
        }
    }

    /// Relational head, or an `ite` whose three arguments are Boolean.
    pub fn is_boolean_term(&self, t: &Term) -> bool {
        match t {
            Term::Nat(_) => false,
            Term::App { head, args } => match self.structure.resolve(head) {
                Some(Resolved::Logic(LogicOp::Ite)) => args.iter().all(|a| self.is_boolean_term(a)),
                Some(r) => r.relational(),
                None => false,
            },
        }
    }

    fn check_rule(&self, r: &Rule) -> Result<(), CheckError> {
        match r {
            Rule::Assign { head, args, rhs } => {
                let sym = self
                    .vocabulary()
                    .get(head)
                    .ok_or_else(|| match self.structure.resolve(head) {
                        Some(_) => CheckError::NotDynamic(head.clone()),
                        None => CheckError::UnknownSymbol(head.clone()),
                    })?;
                if !sym.is_dynamic() {
                    return Err(CheckError::NotDynamic(head.clone()));
                }
                if sym.arity != args.len() {
                    return Err(CheckError::Arity {
                        symbol: head.clone(),
                        expected: sym.arity,
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|a| self.check_term(a))?;
                self.check_term(rhs)?;
                if sym.relational && !self.is_boolean_term(rhs) {
                    return Err(CheckError::NonBooleanAssignment(head.clone()));
                }
                Ok(())
            }
            Rule::Cond {
                guard,
                then,
                otherwise,
            } => {
                self.check_term(guard)?;
                if !self.is_boolean_term(guard) {
                    return Err(CheckError::NonBooleanGuard(crate::printer::print_term(guard)));
                }
                self.check_rule(then)?;
                self.check_rule(otherwise)
            }
            Rule::Par(rs) => rs.iter().try_for_each(|r| self.check_rule(r)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocab::Symbol;

    fn base() -> Structure {
        let mut s = Structure::default();
        s.datastructure.arithmetic = true;
        s.vocabulary
            .insert(Symbol::dynamic("x", 0).numerical().with_io(IoRole::Input(0)))
            .unwrap();
        s.vocabulary
            .insert(Symbol::dynamic("out", 0).with_io(IoRole::Output))
            .unwrap();
        s
    }

    #[test]
    fn accepts_simple_program() {
        let a = Algorithm::new(base(), Rule::assign("out", vec![], Term::succ(Term::constant("x"))));
        assert_eq!(a.check(false), Ok(()));
    }

    #[test]
    fn rejects_static_target() {
        let a = Algorithm::new(base(), Rule::assign("succ", vec![Term::Nat(0)], Term::Nat(1)));
        assert_eq!(a.check(false), Err(CheckError::NotDynamic("succ".into())));
    }

    #[test]
    fn rejects_arity_mismatch() {
        let a = Algorithm::new(base(), Rule::assign("out", vec![], Term::app("succ", vec![])));
        assert!(matches!(a.check(false), Err(CheckError::Arity { .. })));
    }

    #[test]
    fn rejects_numeral_guard() {
        let a = Algorithm::new(base(), Rule::cond(Term::Nat(1), Rule::skip(), Rule::skip()));
        assert!(matches!(a.check(false), Err(CheckError::NonBooleanGuard(_))));
    }

    #[test]
    fn rejects_reserved_names_unless_allowed() {
        let mut s = base();
        s.vocabulary.insert(Symbol::dynamic("$d_f", 1)).unwrap();
        let a = Algorithm::new(s, Rule::skip());
        assert!(matches!(a.check(false), Err(CheckError::Reserved(_))));
        assert_eq!(a.check(true), Ok(()));
    }

    #[test]
    fn initial_state_binds_inputs() {
        let a = Algorithm::new(base(), Rule::skip());
        let st = a.initial_state(&[Value::Nat(4)]).unwrap();
        assert_eq!(st.read("x", &[]), Value::Nat(4));
        assert_eq!(st.read("out", &[]), Value::Nil);
        assert!(a.initial_state(&[]).is_err());
    }
}
