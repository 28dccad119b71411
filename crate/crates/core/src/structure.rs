//! The static part of a state: datastructure backends, static tables, and the
//! union of structures.

use std::collections::{BTreeMap, BTreeSet};

use indexmap::IndexMap;
use thiserror::Error;

use crate::value::{fmt_args, name, Name, Value};
use crate::vocab::{LogicOp, Symbol, Vocabulary};

/// Backend-provided datastructure: optional natural-number arithmetic plus a
/// list of finite enumerations. Sorts are static unary relations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Datastructure {
    pub arithmetic: bool,
    pub enums: IndexMap<Name, Vec<Name>>,
}

/// A backend operation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Builtin {
    Zero,
    Succ,
    /// `pred(0) = 0`.
    Pred,
    /// Sort relation of the naturals.
    IsNat,
    /// Sort relation of an enumeration.
    EnumSort(Name),
    EnumElem { datatype: Name, element: Name },
}

impl Builtin {
    pub fn arity(&self) -> usize {
        match self {
            Builtin::Zero | Builtin::EnumElem { .. } => 0,
            _ => 1,
        }
    }

    pub fn relational(&self) -> bool {
        matches!(self, Builtin::IsNat | Builtin::EnumSort(_))
    }

    pub fn numerical(&self) -> bool {
        matches!(self, Builtin::Zero)
    }

    /// Total on every element. Non-naturals map to nil under succ/pred.
    pub fn apply(&self, args: &[Value]) -> Value {
        match self {
            Builtin::Zero => Value::Nat(0),
            Builtin::Succ => match args[0] {
                Value::Nat(n) => Value::Nat(n.saturating_add(1)),
                _ => Value::Nil,
            },
            Builtin::Pred => match args[0] {
                Value::Nat(n) => Value::Nat(n.saturating_sub(1)),
                _ => Value::Nil,
            },
            Builtin::IsNat => Value::from_bool(matches!(args[0], Value::Nat(_))),
            Builtin::EnumSort(dt) => Value::from_bool(
                matches!(&args[0], Value::Enum { datatype, .. } if datatype == dt),
            ),
            Builtin::EnumElem { datatype, element } => Value::Enum {
                datatype: datatype.clone(),
                element: element.clone(),
            },
        }
    }
}

pub const ARITHMETIC_OPS: [&str; 4] = ["zero", "succ", "pred", "nat"];

impl Datastructure {
    pub fn builtin(&self, symbol: &str) -> Option<Builtin> {
        if self.arithmetic {
            match symbol {
                "zero" => return Some(Builtin::Zero),
                "succ" => return Some(Builtin::Succ),
                "pred" => return Some(Builtin::Pred),
                "nat" => return Some(Builtin::IsNat),
                _ => {}
            }
        }
        for (dt, elems) in &self.enums {
            if &**dt == symbol {
                return Some(Builtin::EnumSort(dt.clone()));
            }
            if let Some(e) = elems.iter().find(|e| &***e == symbol) {
                return Some(Builtin::EnumElem {
                    datatype: dt.clone(),
                    element: e.clone(),
                });
            }
        }
        None
    }

    /// Every backend-provided symbol name.
    pub fn builtin_names(&self) -> Vec<Name> {
        let mut out: Vec<Name> = Vec::new();
        if self.arithmetic {
            out.extend(ARITHMETIC_OPS.iter().map(name));
        }
        for (dt, elems) in &self.enums {
            out.push(dt.clone());
            out.extend(elems.iter().cloned());
        }
        out
    }

    pub fn domain(&self) -> Domain {
        Domain {
            arithmetic: self.arithmetic,
            enums: self.enums.keys().cloned().collect(),
        }
    }

    /// Resolves an element name of some enumeration.
    pub fn element(&self, element: &str) -> Option<Value> {
        self.enums.iter().find_map(|(dt, elems)| {
            elems
                .iter()
                .find(|e| &***e == element)
                .map(|e| Value::Enum {
                    datatype: dt.clone(),
                    element: e.clone(),
                })
        })
    }

    pub fn contains(&self, v: &Value) -> bool {
        match v {
            Value::True | Value::False | Value::Nil => true,
            Value::Nat(_) => self.arithmetic,
            Value::Enum { datatype, element } => self
                .enums
                .get(datatype)
                .is_some_and(|els| els.contains(element)),
        }
    }
}

/// Description of a base set: logic elements, optionally the naturals, and
/// the elements of the listed enumerations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Domain {
    pub arithmetic: bool,
    pub enums: BTreeSet<Name>,
}

impl Domain {
    pub fn contains(&self, v: &Value) -> bool {
        match v {
            Value::True | Value::False | Value::Nil => true,
            Value::Nat(_) => self.arithmetic,
            Value::Enum { datatype, .. } => self.enums.contains(datatype),
        }
    }

    fn intersect(&self, other: &Domain) -> Domain {
        Domain {
            arithmetic: self.arithmetic && other.arithmetic,
            enums: self.enums.intersection(&other.enums).cloned().collect(),
        }
    }
}

/// A finite table interpreting a static symbol on (part of) the base set.
///
/// Outside `entries` the table yields `fallback`, or is undefined when the
/// fallback is absent. A part only speaks for tuples inside its `domain`
/// (`None` means the owning structure's whole base set).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TablePart {
    pub domain: Option<Domain>,
    pub entries: BTreeMap<Vec<Value>, Value>,
    pub fallback: Option<Value>,
}

impl TablePart {
    pub fn partial(entries: BTreeMap<Vec<Value>, Value>) -> TablePart {
        TablePart {
            domain: None,
            entries,
            fallback: None,
        }
    }

    fn lookup(&self, args: &[Value]) -> Option<Value> {
        self.entries.get(args).cloned().or_else(|| self.fallback.clone())
    }
}

/// Outcome of evaluating a basic static function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StaticValue {
    Defined(Value),
    Undefined,
}

/// How a symbol name resolves in a structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Resolved<'a> {
    Logic(LogicOp),
    Builtin(Builtin),
    Declared(&'a Symbol),
}

impl Resolved<'_> {
    pub fn arity(&self) -> usize {
        match self {
            Resolved::Logic(op) => op.arity(),
            Resolved::Builtin(b) => b.arity(),
            Resolved::Declared(s) => s.arity,
        }
    }

    pub fn relational(&self) -> bool {
        match self {
            Resolved::Logic(op) => op.relational(),
            Resolved::Builtin(b) => b.relational(),
            Resolved::Declared(s) => s.relational,
        }
    }
}

/// A state without its dynamic part.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Structure {
    pub vocabulary: Vocabulary,
    pub datastructure: Datastructure,
    /// Table-static interpretations, possibly several parts per symbol after
    /// a union.
    pub tables: IndexMap<Name, Vec<TablePart>>,
}

impl Structure {
    pub fn resolve(&self, symbol: &str) -> Option<Resolved<'_>> {
        if let Some(op) = LogicOp::from_name(symbol) {
            return Some(Resolved::Logic(op));
        }
        if let Some(b) = self.datastructure.builtin(symbol) {
            return Some(Resolved::Builtin(b));
        }
        self.vocabulary.get(symbol).map(Resolved::Declared)
    }

    /// Interpretation of an intrinsic table static. A tuple that no part
    /// covers yields the symbol's default value.
    pub fn table_value(&self, symbol: &Symbol, args: &[Value]) -> StaticValue {
        let whole = self.datastructure.domain();
        let Some(parts) = self.tables.get(&symbol.name) else {
            // declared without a table: nowhere defined
            return StaticValue::Undefined;
        };
        for part in parts {
            let dom = part.domain.as_ref().unwrap_or(&whole);
            if args.iter().all(|a| dom.contains(a)) {
                return match part.lookup(args) {
                    Some(v) => StaticValue::Defined(v),
                    None => StaticValue::Undefined,
                };
            }
        }
        StaticValue::Defined(symbol.default_value())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InconsistencyError {
    #[error("structures disagree on symbol `{symbol}`")]
    Symbol { symbol: Name },
    #[error("structures disagree on `{symbol}` at {}", fmt_args(args))]
    Value { symbol: Name, args: Vec<Value> },
}

/// Union of pairwise consistent structures sharing the logic elements.
///
/// A table of part `i` applied to a tuple not entirely inside part `i`'s
/// base set yields the default value; this is realized by tagging each table
/// part with the domain of the structure it came from.
pub fn union_structures(parts: &[Structure]) -> Result<Structure, InconsistencyError> {
    let mut out = Structure::default();
    for p in parts {
        out.datastructure.arithmetic |= p.datastructure.arithmetic;
        for (dt, elems) in &p.datastructure.enums {
            match out.datastructure.enums.get(dt) {
                Some(existing) if existing != elems => {
                    return Err(InconsistencyError::Symbol { symbol: dt.clone() })
                }
                Some(_) => {}
                None => {
                    out.datastructure.enums.insert(dt.clone(), elems.clone());
                }
            }
        }
        for sym in p.vocabulary.iter() {
            out.vocabulary
                .merge(sym.clone())
                .map_err(|_| InconsistencyError::Symbol {
                    symbol: sym.name.clone(),
                })?;
        }
    }
    // Builtin names must not collide with each other or with declared symbols.
    let mut seen = BTreeSet::new();
    for b in out.datastructure.builtin_names() {
        if !seen.insert(b.clone()) || out.vocabulary.contains(&b) {
            return Err(InconsistencyError::Symbol { symbol: b });
        }
    }

    // Tag every table part with the domain of its structure.
    let mut tagged: IndexMap<Name, Vec<(usize, TablePart)>> = IndexMap::new();
    for (i, p) in parts.iter().enumerate() {
        let dom = p.datastructure.domain();
        for (sym, tparts) in &p.tables {
            for tp in tparts {
                let mut tp = tp.clone();
                tp.domain.get_or_insert_with(|| dom.clone());
                tagged.entry(sym.clone()).or_default().push((i, tp));
            }
        }
    }
    // Intrinsic statics declared without a table are nowhere defined on their
    // own base set: represent them as empty partial parts so the consistency
    // probe below sees them.
    for (i, p) in parts.iter().enumerate() {
        for sym in p.vocabulary.iter() {
            if sym.is_static && sym.intrinsic && !p.tables.contains_key(&sym.name) {
                tagged.entry(sym.name.clone()).or_default().push((
                    i,
                    TablePart {
                        domain: Some(p.datastructure.domain()),
                        ..TablePart::default()
                    },
                ));
            }
        }
    }

    for (sym, tparts) in &tagged {
        for (a, (ia, pa)) in tparts.iter().enumerate() {
            for (ib, pb) in tparts.iter().skip(a + 1) {
                if ia == ib {
                    continue;
                }
                let arity = out.vocabulary.get(sym).map_or(0, |s| s.arity);
                check_parts_agree(sym, arity, pa, pb)?;
            }
        }
    }

    let whole = out.datastructure.domain();
    for (sym, tparts) in tagged {
        let mut merged: Vec<TablePart> = Vec::new();
        for (_, mut tp) in tparts {
            if tp.domain.as_ref() == Some(&whole) {
                tp.domain = None;
            }
            if !merged.contains(&tp) {
                merged.push(tp);
            }
        }
        out.tables.insert(sym, merged);
    }
    Ok(out)
}

fn check_parts_agree(
    sym: &Name,
    arity: usize,
    a: &TablePart,
    b: &TablePart,
) -> Result<(), InconsistencyError> {
    let (Some(da), Some(db)) = (&a.domain, &b.domain) else {
        unreachable!("parts are tagged before comparison")
    };
    let shared = da.intersect(db);
    let mut probes: BTreeSet<Vec<Value>> =
        a.entries.keys().chain(b.entries.keys()).cloned().collect();
    if arity <= 3 {
        probes.extend(logic_tuples(arity));
    } else {
        probes.insert(vec![Value::Nil; arity]);
    }
    for args in probes {
        if !args.iter().all(|v| shared.contains(v)) {
            continue;
        }
        if a.lookup(&args) != b.lookup(&args) {
            return Err(InconsistencyError::Value {
                symbol: sym.clone(),
                args,
            });
        }
    }
    Ok(())
}

fn logic_tuples(r: usize) -> Vec<Vec<Value>> {
    let logic = [Value::True, Value::False, Value::Nil];
    let mut out = vec![Vec::new()];
    for _ in 0..r {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                logic.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push(v.clone());
                    p
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn enum_structure(dt: &str, elems: &[&str], table: &str, entries: &[(&str, Value)]) -> Structure {
        let mut ds = Datastructure::default();
        ds.enums.insert(name(dt), elems.iter().map(name).collect());
        let mut s = Structure {
            datastructure: ds,
            ..Structure::default()
        };
        s.vocabulary.insert(Symbol::static_intrinsic(table, 1)).unwrap();
        let map = entries
            .iter()
            .map(|(e, v)| (vec![Value::enum_elem(dt, e)], v.clone()))
            .collect();
        s.tables.insert(name(table), vec![TablePart::partial(map)]);
        s
    }

    #[test]
    fn union_defaults_outside_own_base_set() {
        let x1 = enum_structure("ab", &["a", "b"], "color", &[("a", Value::True), ("b", Value::False)]);
        let x2 = enum_structure("cc", &["c"], "size", &[("c", Value::Nat(3))]);
        let u = union_structures(&[x1, x2]).unwrap();
        let color = u.vocabulary.get("color").unwrap().clone();
        let size = u.vocabulary.get("size").unwrap().clone();
        assert_eq!(
            u.table_value(&color, &[Value::enum_elem("cc", "c")]),
            StaticValue::Defined(Value::Nil)
        );
        assert_eq!(
            u.table_value(&color, &[Value::enum_elem("ab", "a")]),
            StaticValue::Defined(Value::True)
        );
        assert_eq!(
            u.table_value(&size, &[Value::enum_elem("cc", "c")]),
            StaticValue::Defined(Value::Nat(3))
        );
        // inside the part's base set but outside the table: still partial
        assert_eq!(u.table_value(&color, &[Value::Nil]), StaticValue::Undefined);
    }

    #[test]
    fn union_with_itself_is_observably_identical() {
        let x = enum_structure("ab", &["a", "b"], "color", &[("a", Value::True)]);
        let u = union_structures(&[x.clone(), x.clone()]).unwrap();
        assert_eq!(u, x);
    }

    #[test]
    fn clashing_values_are_reported() {
        let x1 = enum_structure("ab", &["a", "b"], "f", &[("a", Value::Nat(1))]);
        let x2 = enum_structure("ab", &["a", "b"], "f", &[("a", Value::Nat(2))]);
        assert_eq!(
            union_structures(&[x1, x2]),
            Err(InconsistencyError::Value {
                symbol: name("f"),
                args: vec![Value::enum_elem("ab", "a")]
            })
        );
    }

    #[test]
    fn builtin_arithmetic() {
        assert_eq!(Builtin::Pred.apply(&[Value::Nat(0)]), Value::Nat(0));
        assert_eq!(Builtin::Succ.apply(&[Value::Nat(4)]), Value::Nat(5));
        assert_eq!(Builtin::Succ.apply(&[Value::True]), Value::Nil);
    }
}
