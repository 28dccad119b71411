//! States, locations and update sets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::eval::Failure;
use crate::structure::Structure;
use crate::value::{fmt_args, Name, Value};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Location {
    pub symbol: Name,
    pub args: Vec<Value>,
}

impl Location {
    pub fn new(symbol: Name, args: Vec<Value>) -> Location {
        Location { symbol, args }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.is_empty() {
            f.write_str(&self.symbol)
        } else {
            write!(f, "{}{}", self.symbol, fmt_args(&self.args))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Update {
    pub location: Location,
    pub value: Value,
}

/// A finite set of updates; possibly inconsistent until checked.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UpdateSet(pub BTreeSet<Update>);

impl UpdateSet {
    pub fn new() -> UpdateSet {
        UpdateSet::default()
    }

    pub fn insert(&mut self, location: Location, value: Value) {
        self.0.insert(Update { location, value });
    }

    pub fn extend(&mut self, other: UpdateSet) {
        self.0.extend(other.0);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Update> {
        self.0.iter()
    }

    pub fn locations(&self) -> BTreeSet<&Location> {
        self.0.iter().map(|u| &u.location).collect()
    }

    /// The first pair of contradictory updates, if any.
    pub fn contradiction(&self) -> Option<(Location, Value, Value)> {
        let mut seen: BTreeMap<&Location, &Value> = BTreeMap::new();
        for u in &self.0 {
            if let Some(prev) = seen.insert(&u.location, &u.value) {
                if prev != &u.value {
                    return Some((u.location.clone(), prev.clone(), u.value.clone()));
                }
            }
        }
        None
    }

    pub fn is_consistent(&self) -> bool {
        self.contradiction().is_none()
    }
}

impl FromIterator<(Location, Value)> for UpdateSet {
    fn from_iter<I: IntoIterator<Item = (Location, Value)>>(iter: I) -> Self {
        let mut us = UpdateSet::new();
        for (l, v) in iter {
            us.insert(l, v);
        }
        us
    }
}

/// Finite representation of a first-order structure: the shared static
/// part plus per-dynamic-symbol overrides of the default value.
///
/// Overrides equal to the default are never stored, so structural equality
/// of states coincides with observable equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct State {
    pub structure: Arc<Structure>,
    dynamics: BTreeMap<Name, BTreeMap<Vec<Value>, Value>>,
}

impl State {
    pub fn new(structure: Arc<Structure>) -> State {
        State {
            structure,
            dynamics: BTreeMap::new(),
        }
    }

    /// Content of a dynamic location; the symbol's default when untouched.
    pub fn read(&self, symbol: &str, args: &[Value]) -> Value {
        if let Some(v) = self.dynamics.get(symbol).and_then(|m| m.get(args)) {
            return v.clone();
        }
        self.default_of(symbol)
    }

    fn default_of(&self, symbol: &str) -> Value {
        self.structure
            .vocabulary
            .get(symbol)
            .map_or(Value::Nil, |s| s.default_value())
    }

    /// Sets a location, normalizing default values away.
    pub fn write(&mut self, location: &Location, value: Value) {
        if value == self.default_of(&location.symbol) {
            if let Some(m) = self.dynamics.get_mut(&location.symbol) {
                m.remove(&location.args);
                if m.is_empty() {
                    self.dynamics.remove(&location.symbol);
                }
            }
        } else {
            self.dynamics
                .entry(location.symbol.clone())
                .or_default()
                .insert(location.args.clone(), value);
        }
    }

    /// Non-default contents of `symbol`.
    pub fn overrides(&self, symbol: &str) -> impl Iterator<Item = (&Vec<Value>, &Value)> {
        self.dynamics.get(symbol).into_iter().flat_map(|m| m.iter())
    }

    pub fn overridden_symbols(&self) -> impl Iterator<Item = &Name> {
        self.dynamics.keys()
    }

    /// Applies a consistent update set; a contradictory one is rejected and
    /// the state is left untouched.
    pub fn apply(&mut self, updates: &UpdateSet) -> Result<(), Failure> {
        if let Some((location, first, second)) = updates.contradiction() {
            return Err(Failure::Contradiction {
                location,
                first,
                second,
            });
        }
        for u in updates.iter() {
            self.write(&u.location, u.value.clone());
        }
        Ok(())
    }

    /// Restriction of the dynamic part to the given symbols.
    pub fn restrict(&self, keep: &dyn Fn(&str) -> bool) -> BTreeMap<Name, BTreeMap<Vec<Value>, Value>> {
        self.dynamics
            .iter()
            .filter(|(k, _)| keep(k))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }
}

/// Successor state for a consistent update set, or the contradiction.
pub fn check_and_apply(state: &State, updates: &UpdateSet) -> Result<State, Failure> {
    let mut next = state.clone();
    next.apply(updates)?;
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::name;
    use crate::vocab::Symbol;

    fn state() -> State {
        let mut s = Structure::default();
        s.vocabulary.insert(Symbol::dynamic("x", 0)).unwrap();
        s.vocabulary.insert(Symbol::dynamic("b", 0).relational()).unwrap();
        State::new(Arc::new(s))
    }

    fn x() -> Location {
        Location::new(name("x"), vec![])
    }

    #[test]
    fn apply_then_read() {
        let st = state();
        let us: UpdateSet = [(x(), Value::Nat(1))].into_iter().collect();
        let next = check_and_apply(&st, &us).unwrap();
        assert_eq!(next.read("x", &[]), Value::Nat(1));
    }

    #[test]
    fn empty_update_set_is_identity() {
        let st = state();
        assert_eq!(check_and_apply(&st, &UpdateSet::new()).unwrap(), st);
    }

    #[test]
    fn contradiction_is_reported() {
        let st = state();
        let us: UpdateSet = [(x(), Value::Nat(1)), (x(), Value::Nat(2))].into_iter().collect();
        assert_eq!(
            check_and_apply(&st, &us),
            Err(Failure::Contradiction {
                location: x(),
                first: Value::Nat(1),
                second: Value::Nat(2)
            })
        );
    }

    #[test]
    fn fresh_state_reads_defaults() {
        let st = state();
        assert_eq!(st.read("x", &[]), Value::Nil);
        assert_eq!(st.read("b", &[]), Value::False);
    }

    #[test]
    fn writing_default_normalizes() {
        let mut st = state();
        st.write(&x(), Value::Nat(3));
        st.write(&x(), Value::Nil);
        assert_eq!(st, state());
    }
}
