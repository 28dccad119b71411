//! Elements of state base sets.

use std::fmt;
use std::sync::Arc;

/// Interned-ish symbol and element name. Cheap to clone.
pub type Name = Arc<str>;

/// Builds a [`Name`] from anything string-like.
pub fn name(s: impl AsRef<str>) -> Name {
    Arc::from(s.as_ref())
}

/// An element of a state's base set.
///
/// The three logic elements are always present and pairwise distinct. Naturals
/// come from the arithmetic backend; enum elements from enum backends.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    True,
    False,
    Nil,
    Nat(u64),
    Enum { datatype: Name, element: Name },
}

impl Value {
    pub fn from_bool(b: bool) -> Value {
        if b {
            Value::True
        } else {
            Value::False
        }
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Value::True)
    }

    pub fn is_boolean(&self) -> bool {
        matches!(self, Value::True | Value::False)
    }

    pub fn as_nat(&self) -> Option<u64> {
        match self {
            Value::Nat(n) => Some(*n),
            _ => None,
        }
    }

    pub fn enum_elem(datatype: impl AsRef<str>, element: impl AsRef<str>) -> Value {
        Value::Enum {
            datatype: name(datatype),
            element: name(element),
        }
    }

    /// JSON encoding used by oracle tables, inputs and traces: booleans,
    /// `null` for nil, numbers for naturals and element names for enums.
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::True => serde_json::Value::Bool(true),
            Value::False => serde_json::Value::Bool(false),
            Value::Nil => serde_json::Value::Null,
            Value::Nat(n) => serde_json::Value::from(*n),
            Value::Enum { element, .. } => serde_json::Value::String(element.to_string()),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::True => f.write_str("true"),
            Value::False => f.write_str("false"),
            Value::Nil => f.write_str("nil"),
            Value::Nat(n) => write!(f, "{n}"),
            Value::Enum { element, .. } => f.write_str(element),
        }
    }
}

/// Formats an argument tuple as `(a, b, c)`.
pub fn fmt_args(args: &[Value]) -> String {
    let inner: Vec<String> = args.iter().map(|v| v.to_string()).collect();
    format!("({})", inner.join(", "))
}
