//! JSON encodings of values, oracle tables and input vectors.
//!
//! An oracle-table document maps each symbol to a list of rows
//! `[arg_1, ..., arg_r, value]`. Values are `true`/`false`, `null` for nil,
//! non-negative integers, or enum element names as strings.

use std::collections::BTreeMap;

use serde_json::{json, Value as Json};
use thiserror::Error;

use crate::structure::Datastructure;
use crate::value::{name, Name, Value};

pub type OracleTables = BTreeMap<Name, BTreeMap<Vec<Value>, Value>>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("expected {0}")]
    Shape(&'static str),
    #[error("cannot read `{0}` as a value")]
    BadValue(String),
}

pub fn value_from_json(ds: &Datastructure, j: &Json) -> Result<Value, TableError> {
    match j {
        Json::Bool(b) => Ok(Value::from_bool(*b)),
        Json::Null => Ok(Value::Nil),
        Json::Number(n) => n
            .as_u64()
            .map(Value::Nat)
            .ok_or_else(|| TableError::BadValue(n.to_string())),
        Json::String(s) => match s.as_str() {
            "nil" => Ok(Value::Nil),
            _ => ds.element(s).ok_or_else(|| TableError::BadValue(s.clone())),
        },
        other => Err(TableError::BadValue(other.to_string())),
    }
}

pub fn parse_oracle_tables(ds: &Datastructure, text: &str) -> Result<OracleTables, TableError> {
    let doc: Json = serde_json::from_str(text).map_err(|e| TableError::Json(e.to_string()))?;
    let obj = doc.as_object().ok_or(TableError::Shape("an object of symbol tables"))?;
    let mut out = OracleTables::new();
    for (sym, rows) in obj {
        let rows = rows.as_array().ok_or(TableError::Shape("a list of rows"))?;
        let table = out.entry(name(sym)).or_default();
        for row in rows {
            let row = row.as_array().ok_or(TableError::Shape("a row [args..., value]"))?;
            let (value, args) = row.split_last().ok_or(TableError::Shape("a non-empty row"))?;
            let args = args
                .iter()
                .map(|a| value_from_json(ds, a))
                .collect::<Result<Vec<_>, _>>()?;
            table.insert(args, value_from_json(ds, value)?);
        }
    }
    Ok(out)
}

pub fn oracle_tables_to_json(tables: &OracleTables) -> Json {
    let mut obj = serde_json::Map::new();
    for (sym, table) in tables {
        let rows: Vec<Json> = table
            .iter()
            .map(|(args, v)| {
                let mut row: Vec<Json> = args.iter().map(Value::to_json).collect();
                row.push(v.to_json());
                Json::Array(row)
            })
            .collect();
        obj.insert(sym.to_string(), Json::Array(rows));
    }
    Json::Object(obj)
}

/// Reads an input vector given as a JSON array.
pub fn parse_inputs(ds: &Datastructure, text: &str) -> Result<Vec<Value>, TableError> {
    let doc: Json = serde_json::from_str(text).map_err(|e| TableError::Json(e.to_string()))?;
    doc.as_array()
        .ok_or(TableError::Shape("a list of input values"))?
        .iter()
        .map(|v| value_from_json(ds, v))
        .collect()
}

pub fn values_to_json(values: &[Value]) -> Json {
    json!(values.iter().map(Value::to_json).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_table_round_trip() {
        let ds = Datastructure {
            arithmetic: true,
            ..Datastructure::default()
        };
        let t = parse_oracle_tables(&ds, r#"{"odd_ext": [[0, false], [1, true], [2, false]]}"#).unwrap();
        assert_eq!(t["odd_ext"][&vec![Value::Nat(1)]], Value::True);
        let back = oracle_tables_to_json(&t).to_string();
        assert_eq!(parse_oracle_tables(&ds, &back).unwrap(), t);
    }

    #[test]
    fn enum_values_resolve() {
        let mut ds = Datastructure::default();
        ds.enums.insert(name("color"), vec![name("red"), name("green")]);
        assert_eq!(
            value_from_json(&ds, &json!("red")).unwrap(),
            Value::enum_elem("color", "red")
        );
        assert!(value_from_json(&ds, &json!("blue")).is_err());
        assert!(value_from_json(&ds, &json!(-1)).is_err());
    }
}
