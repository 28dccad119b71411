//! Function symbols, their markings, and vocabularies.

use indexmap::IndexMap;
use thiserror::Error;

use crate::value::{name, Name, Value};

/// Prefix reserved for symbols introduced by transformation passes.
pub const RESERVED_PREFIX: char = '$';

pub fn is_reserved(symbol: &str) -> bool {
    symbol.starts_with(RESERVED_PREFIX)
}

/// Role of an elementary variable in a function-computing algorithm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IoRole {
    None,
    /// Input variable with its 0-based position.
    Input(usize),
    Output,
}

/// A declared (non-logic, non-backend) function symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Symbol {
    pub name: Name,
    pub arity: usize,
    pub relational: bool,
    pub is_static: bool,
    /// Only meaningful for static symbols.
    pub intrinsic: bool,
    pub numerical: bool,
    pub io: IoRole,
}

impl Symbol {
    pub fn dynamic(name_: impl AsRef<str>, arity: usize) -> Symbol {
        Symbol {
            name: name(name_),
            arity,
            relational: false,
            is_static: false,
            intrinsic: true,
            numerical: false,
            io: IoRole::None,
        }
    }

    pub fn static_intrinsic(name_: impl AsRef<str>, arity: usize) -> Symbol {
        Symbol {
            is_static: true,
            ..Symbol::dynamic(name_, arity)
        }
    }

    pub fn extrinsic(name_: impl AsRef<str>, arity: usize) -> Symbol {
        Symbol {
            is_static: true,
            intrinsic: false,
            ..Symbol::dynamic(name_, arity)
        }
    }

    pub fn relational(mut self) -> Symbol {
        self.relational = true;
        self
    }

    pub fn numerical(mut self) -> Symbol {
        self.numerical = true;
        self
    }

    pub fn with_io(mut self, io: IoRole) -> Symbol {
        self.io = io;
        self
    }

    pub fn is_dynamic(&self) -> bool {
        !self.is_static
    }

    pub fn is_extrinsic(&self) -> bool {
        self.is_static && !self.intrinsic
    }

    /// nil generically, false for relations, 0 for numerical symbols.
    pub fn default_value(&self) -> Value {
        default_for(self.relational, self.numerical)
    }

    /// Same arity and markings. IO roles are a property of the algorithm, not
    /// of the vocabulary, and are ignored here.
    pub fn agrees_with(&self, other: &Symbol) -> bool {
        self.arity == other.arity
            && self.relational == other.relational
            && self.is_static == other.is_static
            && (!self.is_static || self.intrinsic == other.intrinsic)
            && self.numerical == other.numerical
    }
}

pub fn default_for(relational: bool, numerical: bool) -> Value {
    if relational {
        Value::False
    } else if numerical {
        Value::Nat(0)
    } else {
        Value::Nil
    }
}

/// The logic symbols present in every vocabulary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LogicOp {
    Eq,
    True,
    False,
    Nil,
    And,
    Or,
    Not,
    Ite,
}

impl LogicOp {
    pub const ALL: [LogicOp; 8] = [
        LogicOp::Eq,
        LogicOp::True,
        LogicOp::False,
        LogicOp::Nil,
        LogicOp::And,
        LogicOp::Or,
        LogicOp::Not,
        LogicOp::Ite,
    ];

    pub fn from_name(s: &str) -> Option<LogicOp> {
        Some(match s {
            "eq" => LogicOp::Eq,
            "true" => LogicOp::True,
            "false" => LogicOp::False,
            "nil" => LogicOp::Nil,
            "and" => LogicOp::And,
            "or" => LogicOp::Or,
            "not" => LogicOp::Not,
            "ite" => LogicOp::Ite,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            LogicOp::Eq => "eq",
            LogicOp::True => "true",
            LogicOp::False => "false",
            LogicOp::Nil => "nil",
            LogicOp::And => "and",
            LogicOp::Or => "or",
            LogicOp::Not => "not",
            LogicOp::Ite => "ite",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            LogicOp::True | LogicOp::False | LogicOp::Nil => 0,
            LogicOp::Not => 1,
            LogicOp::Eq | LogicOp::And | LogicOp::Or => 2,
            LogicOp::Ite => 3,
        }
    }

    /// All logic symbols except nil and ite are relational.
    pub fn relational(self) -> bool {
        !matches!(self, LogicOp::Nil | LogicOp::Ite)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VocabularyError {
    #[error("symbol `{0}` declared twice")]
    Duplicate(Name),
    #[error("symbols named `{0}` disagree on arity or markings")]
    Inconsistent(Name),
}

/// The declared part of a vocabulary, in declaration order. Logic symbols
/// and backend operations are implicit and never stored here.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocabulary {
    symbols: IndexMap<Name, Symbol>,
}

impl Vocabulary {
    pub fn new() -> Vocabulary {
        Vocabulary::default()
    }

    pub fn insert(&mut self, symbol: Symbol) -> Result<(), VocabularyError> {
        if self.symbols.contains_key(&symbol.name) {
            return Err(VocabularyError::Duplicate(symbol.name.clone()));
        }
        self.symbols.insert(symbol.name.clone(), symbol);
        Ok(())
    }

    /// Inserts or checks agreement with an existing entry.
    pub fn merge(&mut self, symbol: Symbol) -> Result<(), VocabularyError> {
        match self.symbols.get(&symbol.name) {
            Some(existing) if existing.agrees_with(&symbol) => Ok(()),
            Some(_) => Err(VocabularyError::Inconsistent(symbol.name.clone())),
            None => {
                self.symbols.insert(symbol.name.clone(), symbol);
                Ok(())
            }
        }
    }

    pub fn remove(&mut self, symbol: &str) -> Option<Symbol> {
        self.symbols.shift_remove(symbol)
    }

    pub fn get(&self, symbol: &str) -> Option<&Symbol> {
        self.symbols.get(symbol)
    }

    pub fn get_mut(&mut self, symbol: &str) -> Option<&mut Symbol> {
        self.symbols.get_mut(symbol)
    }

    pub fn contains(&self, symbol: &str) -> bool {
        self.symbols.contains_key(symbol)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Symbol> {
        self.symbols.values()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn dynamics(&self) -> impl Iterator<Item = &Symbol> {
        self.iter().filter(|s| s.is_dynamic())
    }

    pub fn inputs(&self) -> Vec<&Symbol> {
        let mut inputs: Vec<(usize, &Symbol)> = self
            .iter()
            .filter_map(|s| match s.io {
                IoRole::Input(pos) => Some((pos, s)),
                _ => None,
            })
            .collect();
        inputs.sort_by_key(|(pos, _)| *pos);
        inputs.into_iter().map(|(_, s)| s).collect()
    }

    pub fn output(&self) -> Option<&Symbol> {
        self.iter().find(|s| s.io == IoRole::Output)
    }

    pub fn extrinsics(&self) -> impl Iterator<Item = &Symbol> {
        self.iter().filter(|s| s.is_extrinsic())
    }

    /// Shared names agree on arity and all markings.
    pub fn consistent_with(&self, other: &Vocabulary) -> Result<(), VocabularyError> {
        for sym in self.iter() {
            if let Some(o) = other.get(&sym.name) {
                if !sym.agrees_with(o) {
                    return Err(VocabularyError::Inconsistent(sym.name.clone()));
                }
            }
        }
        Ok(())
    }
}

/// Means-fit effectivity: no static symbol is extrinsic.
pub fn is_means_fit_effective(vocab: &Vocabulary) -> bool {
    vocab.extrinsics().next().is_none()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_markings() {
        assert_eq!(Symbol::dynamic("f", 1).default_value(), Value::Nil);
        assert_eq!(Symbol::dynamic("b", 0).relational().default_value(), Value::False);
        assert_eq!(Symbol::dynamic("n", 0).numerical().default_value(), Value::Nat(0));
    }

    #[test]
    fn means_fit_effectivity() {
        let mut v = Vocabulary::new();
        v.insert(Symbol::static_intrinsic("g", 1)).unwrap();
        v.insert(Symbol::dynamic("x", 0)).unwrap();
        assert!(is_means_fit_effective(&v));
        v.insert(Symbol::extrinsic("fact", 1).numerical()).unwrap();
        assert!(!is_means_fit_effective(&v));
    }

    #[test]
    fn consistency_checks_markings() {
        let mut a = Vocabulary::new();
        a.insert(Symbol::static_intrinsic("g", 1)).unwrap();
        let mut b = Vocabulary::new();
        b.insert(Symbol::static_intrinsic("g", 1).relational()).unwrap();
        assert_eq!(a.consistent_with(&b), Err(VocabularyError::Inconsistent(name("g"))));
        assert!(a.consistent_with(&a).is_ok());
    }

    #[test]
    fn duplicate_insert_rejected() {
        let mut v = Vocabulary::new();
        v.insert(Symbol::dynamic("x", 0)).unwrap();
        assert!(v.insert(Symbol::dynamic("x", 0)).is_err());
    }
}
