//! Canonical pretty-printer. `parser::parse(&print(u))` reproduces `u`.

use std::fmt::Write;

use crate::algorithm::Algorithm;
use crate::structure::{Domain, TablePart};
use crate::syntax::{Rule, Term};
use crate::value::Value;
use crate::vocab::{is_reserved, IoRole, Symbol};

const INDENT: &str = "  ";

pub fn print_term(t: &Term) -> String {
    let mut out = String::new();
    write_term(&mut out, t);
    out
}

fn write_term(out: &mut String, t: &Term) {
    match t {
        Term::Nat(n) => write!(out, "{n}").unwrap(),
        Term::App { head, args } => {
            out.push_str(head);
            if !args.is_empty() {
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_term(out, a);
                }
                out.push(')');
            }
        }
    }
}

pub fn print_rule(r: &Rule) -> String {
    let mut out = String::new();
    write_rule(&mut out, r, 0, false);
    out
}

fn pad(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str(INDENT);
    }
}

/// `in_then` is set when the rule sits in a then-branch: an `else` omitted
/// there would be captured by the enclosing conditional on reparse.
fn write_rule(out: &mut String, r: &Rule, depth: usize, in_then: bool) {
    pad(out, depth);
    write_rule_body(out, r, depth, in_then);
}

fn write_rule_body(out: &mut String, r: &Rule, depth: usize, in_then: bool) {
    match r {
        Rule::Assign { head, args, rhs } => {
            write_term(
                out,
                &Term::App {
                    head: head.clone(),
                    args: args.clone(),
                },
            );
            out.push_str(" := ");
            write_term(out, rhs);
        }
        Rule::Par(rs) if rs.is_empty() => out.push_str("skip"),
        Rule::Par(rs) => {
            out.push_str("par {\n");
            for (i, c) in rs.iter().enumerate() {
                write_rule(out, c, depth + 1, false);
                if i + 1 < rs.len() {
                    out.push(';');
                }
                out.push('\n');
            }
            pad(out, depth);
            out.push('}');
        }
        Rule::Cond {
            guard,
            then,
            otherwise,
        } => {
            out.push_str("if ");
            write_term(out, guard);
            out.push_str(" then\n");
            write_rule(out, then, depth + 1, true);
            if otherwise.is_skip() && !in_then {
                return;
            }
            out.push('\n');
            pad(out, depth);
            if let Rule::Cond { .. } = **otherwise {
                out.push_str("else ");
                write_rule_body(out, otherwise, depth, in_then);
            } else {
                out.push_str("else\n");
                write_rule(out, otherwise, depth + 1, in_then);
            }
        }
    }
}

fn write_symbol(out: &mut String, s: &Symbol) {
    write!(out, "fn {}/{}", s.name, s.arity).unwrap();
    if s.is_static {
        out.push_str(if s.intrinsic {
            " static intrinsic"
        } else {
            " static extrinsic"
        });
    } else {
        out.push_str(" dynamic");
    }
    if s.relational {
        out.push_str(" relational");
    }
    if s.numerical {
        out.push_str(" numeric");
    }
    match s.io {
        IoRole::None => {}
        IoRole::Input(p) => write!(out, " in {p}").unwrap(),
        IoRole::Output => out.push_str(" out"),
    }
    out.push('\n');
}

fn write_entries<'a>(out: &mut String, entries: impl Iterator<Item = (&'a Vec<Value>, &'a Value)>) {
    let items: Vec<String> = entries
        .map(|(args, v)| {
            let a: Vec<String> = args.iter().map(Value::to_string).collect();
            format!("[{}] -> {}", a.join(", "), v)
        })
        .collect();
    if items.is_empty() {
        out.push_str("{ }");
    } else {
        write!(out, "{{ {} }}", items.join(", ")).unwrap();
    }
}

fn write_domain(out: &mut String, d: &Domain) {
    let mut parts: Vec<String> = Vec::new();
    if d.arithmetic {
        parts.push("arithmetic".into());
    }
    parts.extend(d.enums.iter().map(|e| e.to_string()));
    write!(out, " over [{}]", parts.join(", ")).unwrap();
}

fn write_table(out: &mut String, symbol: &str, part: &TablePart) {
    write!(out, "table {symbol}").unwrap();
    if let Some(d) = &part.domain {
        write_domain(out, d);
    }
    if let Some(f) = &part.fallback {
        write!(out, " default {f}").unwrap();
    }
    out.push(' ');
    write_entries(out, part.entries.iter());
    out.push('\n');
}

/// Renders a whole unit: declarations, then the program.
pub fn print(unit: &Algorithm) -> String {
    let s = &*unit.structure;
    let mut out = String::new();
    let generated = s.vocabulary.iter().any(|sym| is_reserved(&sym.name));
    if generated {
        out.push_str("pragma generated\n");
    }
    if s.datastructure.arithmetic {
        out.push_str("backend arithmetic\n");
    }
    for (dt, elems) in &s.datastructure.enums {
        let e: Vec<&str> = elems.iter().map(|e| &**e).collect();
        writeln!(out, "enum {dt} {{ {} }}", e.join(", ")).unwrap();
    }
    if !out.is_empty() {
        out.push('\n');
    }
    for sym in s.vocabulary.iter() {
        write_symbol(&mut out, sym);
    }
    if !s.tables.is_empty() || !unit.init.is_empty() {
        out.push('\n');
    }
    for (sym, parts) in &s.tables {
        for p in parts {
            write_table(&mut out, sym, p);
        }
    }
    for (sym, entries) in &unit.init {
        write!(out, "init {sym} ").unwrap();
        write_entries(&mut out, entries.iter());
        out.push('\n');
    }
    out.push_str("\nprogram\n");
    write_rule(&mut out, &unit.program, 1, false);
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skip_prints_as_keyword() {
        assert_eq!(print_rule(&Rule::skip()), "skip");
    }

    #[test]
    fn nested_ite_is_parenthesized() {
        let t = Term::ite(
            Term::app("d", vec![Term::constant("x")]),
            Term::ite(Term::constant("b"), Term::Nat(1), Term::Nat(2)),
            Term::nil(),
        );
        assert_eq!(print_term(&t), "ite(d(x), ite(b, 1, 2), nil)");
    }

    #[test]
    fn else_chain_is_flat() {
        let r = Rule::cond(
            Term::constant("a"),
            Rule::assign("x", vec![], Term::Nat(1)),
            Rule::cond(Term::constant("b"), Rule::assign("x", vec![], Term::Nat(2)), Rule::skip()),
        );
        assert_eq!(print_rule(&r), "if a then\n  x := 1\nelse if b then\n  x := 2");
    }
}
