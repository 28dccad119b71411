//! Parser for the textual ASM language.
//!
//! ```text
//! unit    := decl* ["program"] [rule]
//! decl    := "pragma" "generated"
//!          | "backend" "arithmetic"
//!          | "enum" IDENT "{" IDENT ("," IDENT)* "}"
//!          | "fn" IDENT "/" NAT flag*
//!          | "table" IDENT ["over" "[" dom,* "]"] ["default" value] entries
//!          | "init" IDENT entries
//! flag    := static | dynamic | intrinsic | extrinsic | relational | numeric
//!          | "in" NAT | out
//! entries := "{" [ "[" value,* "]" "->" value ("," ...)* ] "}"
//! rule    := term ":=" term | "if" term "then" rule ["else" rule]
//!          | "par" "{" rule (";" rule)* "}" | "skip"
//! term    := NAT | IDENT ["(" [term ("," term)*] ")"]
//! ```
//!
//! Line comments start with `//`.

use std::collections::BTreeMap;
use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

use crate::algorithm::{Algorithm, CheckError};
use crate::structure::{Datastructure, Domain, Structure, TablePart};
use crate::syntax::{Rule, Term};
use crate::value::{name, Name, Value};
use crate::vocab::{IoRole, Symbol, VocabularyError};

const KEYWORDS: [&str; 12] = [
    "fn", "table", "init", "enum", "backend", "pragma", "program", "if", "then", "else", "par",
    "skip",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: expected {expected}, found {found}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SourceError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("check error: {0}")]
    Check(#[from] CheckError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nat(u64),
    Punct(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Nat(n) => write!(f, "`{n}`"),
            Tok::Punct(p) => write!(f, "`{p}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

struct Lexed {
    tok: Tok,
    line: usize,
    column: usize,
}

const PUNCT: [&str; 11] = [":=", "->", "(", ")", "{", "}", "[", "]", ",", ";", "/"];

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_' || c == '$'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '$'
}

fn lex(src: &str) -> Result<Vec<Lexed>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, column, found: String| ParseError {
        line,
        column,
        expected: "a token".into(),
        found,
    };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (start_line, start_col) = (line, col);
        if is_ident_start(c) {
            let s = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            col += i - s;
            out.push(Lexed {
                tok: Tok::Ident(chars[s..i].iter().collect()),
                line: start_line,
                column: start_col,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let s = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            col += i - s;
            let text: String = chars[s..i].iter().collect();
            let n = text
                .parse::<u64>()
                .map_err(|_| err(start_line, start_col, format!("numeral `{text}` out of range")))?;
            out.push(Lexed {
                tok: Tok::Nat(n),
                line: start_line,
                column: start_col,
            });
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match PUNCT.iter().find(|p| rest.starts_with(**p)) {
            Some(p) => {
                i += p.len();
                col += p.len();
                out.push(Lexed {
                    tok: Tok::Punct(p),
                    line: start_line,
                    column: start_col,
                });
            }
            None => return Err(err(start_line, start_col, format!("character `{c}`"))),
        }
    }
    out.push(Lexed {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

/// A value literal before enum element names are resolved.
#[derive(Clone, Debug)]
enum RawValue {
    Nat(u64),
    Ident(String, usize, usize),
}

type RawEntries = Vec<(Vec<RawValue>, RawValue)>;

struct RawTable {
    symbol: Name,
    domain: Option<(bool, Vec<Name>)>,
    fallback: Option<RawValue>,
    entries: RawEntries,
}

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: impl Into<String>) -> ParseError {
        let l = &self.toks[self.pos];
        ParseError {
            line: l.line,
            column: l.column,
            expected: expected.into(),
            found: l.tok.to_string(),
        }
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == w)
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), ParseError> {
        if self.is_punct(p) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("`{p}`")))
        }
    }

    fn expect_word(&mut self, w: &str) -> Result<(), ParseError> {
        if self.is_word(w) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("`{w}`")))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => Err(self.error("an identifier")),
        }
    }

    fn nat(&mut self) -> Result<u64, ParseError> {
        match self.peek() {
            Tok::Nat(n) => {
                let n = *n;
                self.bump();
                Ok(n)
            }
            _ => Err(self.error("a numeral")),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        if let Tok::Nat(n) = self.peek() {
            let n = *n;
            self.bump();
            return Ok(Term::Nat(n));
        }
        let head = self.ident().map_err(|_| self.error("a term"))?;
        let mut args = Vec::new();
        if self.is_punct("(") {
            self.bump();
            if !self.is_punct(")") {
                loop {
                    args.push(self.term()?);
                    if self.is_punct(",") {
                        self.bump();
                    } else {
                        break;
                    }
                }
            }
            self.expect_punct(")")?;
        }
        Ok(Term::app(head, args))
    }

    fn rule(&mut self) -> Result<Rule, ParseError> {
        if self.is_word("skip") {
            self.bump();
            return Ok(Rule::skip());
        }
        if self.is_word("par") {
            self.bump();
            self.expect_punct("{")?;
            let mut rs = vec![self.rule()?];
            while self.is_punct(";") {
                self.bump();
                rs.push(self.rule()?);
            }
            self.expect_punct("}")?;
            return Ok(Rule::Par(rs));
        }
        if self.is_word("if") {
            self.bump();
            let guard = self.term()?;
            self.expect_word("then")?;
            let then = self.rule()?;
            let otherwise = if self.is_word("else") {
                self.bump();
                self.rule()?
            } else {
                Rule::skip()
            };
            return Ok(Rule::cond(guard, then, otherwise));
        }
        let lhs = match self.peek() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => self.term()?,
            _ => return Err(self.error("a rule")),
        };
        self.expect_punct(":=")?;
        let rhs = self.term()?;
        match lhs {
            Term::App { head, args } => Ok(Rule::Assign { head, args, rhs }),
            Term::Nat(_) => unreachable!("lhs starts with an identifier"),
        }
    }

    fn raw_value(&mut self) -> Result<RawValue, ParseError> {
        let l = &self.toks[self.pos];
        let (line, column) = (l.line, l.column);
        match self.peek().clone() {
            Tok::Nat(n) => {
                self.bump();
                Ok(RawValue::Nat(n))
            }
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(RawValue::Ident(s, line, column))
            }
            _ => Err(self.error("a value")),
        }
    }

    fn entries(&mut self) -> Result<RawEntries, ParseError> {
        self.expect_punct("{")?;
        let mut out = Vec::new();
        while !self.is_punct("}") {
            self.expect_punct("[")?;
            let mut args = Vec::new();
            if !self.is_punct("]") {
                loop {
                    args.push(self.raw_value()?);
                    if self.is_punct(",") {
                        self.bump();
                    } else {
                        break;
                    }
                }
            }
            self.expect_punct("]")?;
            self.expect_punct("->")?;
            let v = self.raw_value()?;
            out.push((args, v));
            if self.is_punct(",") {
                self.bump();
            } else {
                break;
            }
        }
        self.expect_punct("}")?;
        Ok(out)
    }

    fn symbol_decl(&mut self) -> Result<Symbol, ParseError> {
        let sym_name = self.ident()?;
        self.expect_punct("/")?;
        let arity = self.nat()? as usize;
        let mut sym = Symbol::dynamic(&sym_name, arity);
        let (mut kind, mut origin) = (None, None);
        while let Tok::Ident(w) = self.peek().clone() {
            match w.as_str() {
                "static" | "dynamic" if kind.is_none() => kind = Some(w == "static"),
                "intrinsic" | "extrinsic" if origin.is_none() => origin = Some(w == "intrinsic"),
                "relational" if !sym.relational && !sym.numerical => sym.relational = true,
                "numeric" if !sym.relational && !sym.numerical => sym.numerical = true,
                "out" if sym.io == IoRole::None => sym.io = IoRole::Output,
                "in" if sym.io == IoRole::None => {
                    self.bump();
                    sym.io = IoRole::Input(self.nat()? as usize);
                    continue;
                }
                _ => break,
            }
            self.bump();
        }
        match (kind, origin) {
            (Some(false), Some(_)) => return Err(self.error("no intrinsic/extrinsic marking on a dynamic symbol")),
            (None | Some(false), None) => {}
            (_, origin) => {
                sym.is_static = true;
                sym.intrinsic = origin.unwrap_or(true);
            }
        }
        Ok(sym)
    }

    fn table_decl(&mut self) -> Result<RawTable, ParseError> {
        let symbol = name(self.ident()?);
        let mut domain = None;
        if self.is_word("over") {
            self.bump();
            self.expect_punct("[")?;
            let (mut arith, mut enums) = (false, Vec::new());
            while !self.is_punct("]") {
                if self.is_word("arithmetic") {
                    self.bump();
                    arith = true;
                } else {
                    enums.push(name(self.ident()?));
                }
                if self.is_punct(",") {
                    self.bump();
                } else {
                    break;
                }
            }
            self.expect_punct("]")?;
            domain = Some((arith, enums));
        }
        let mut fallback = None;
        if self.is_word("default") {
            self.bump();
            fallback = Some(self.raw_value()?);
        }
        let entries = self.entries()?;
        Ok(RawTable {
            symbol,
            domain,
            fallback,
            entries,
        })
    }
}

fn resolve(ds: &Datastructure, v: &RawValue) -> Result<Value, ParseError> {
    match v {
        RawValue::Nat(n) => Ok(Value::Nat(*n)),
        RawValue::Ident(s, line, column) => match s.as_str() {
            "true" => Ok(Value::True),
            "false" => Ok(Value::False),
            "nil" => Ok(Value::Nil),
            other => ds.element(other).ok_or_else(|| ParseError {
                line: *line,
                column: *column,
                expected: "a value (true, false, nil, a numeral or an enum element)".into(),
                found: format!("`{other}`"),
            }),
        },
    }
}

fn resolve_entries(
    ds: &Datastructure,
    raw: &RawEntries,
) -> Result<BTreeMap<Vec<Value>, Value>, ParseError> {
    let mut out = BTreeMap::new();
    for (args, v) in raw {
        let args = args.iter().map(|a| resolve(ds, a)).collect::<Result<Vec<_>, _>>()?;
        out.insert(args, resolve(ds, v)?);
    }
    Ok(out)
}

/// Parses a unit without running the static checks.
pub fn parse_unchecked(src: &str) -> Result<(Algorithm, bool), SourceError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
    };
    let mut generated = false;
    let mut structure = Structure::default();
    let mut tables: Vec<RawTable> = Vec::new();
    let mut inits: Vec<(Name, RawEntries)> = Vec::new();
    loop {
        match p.peek().clone() {
            Tok::Ident(w) if w == "pragma" => {
                p.bump();
                p.expect_word("generated")?;
                generated = true;
            }
            Tok::Ident(w) if w == "backend" => {
                p.bump();
                p.expect_word("arithmetic")?;
                structure.datastructure.arithmetic = true;
            }
            Tok::Ident(w) if w == "enum" => {
                p.bump();
                let dt = p.ident()?;
                if dt == "arithmetic" {
                    return Err(p.error("an enum name other than `arithmetic`").into());
                }
                p.expect_punct("{")?;
                let mut elems = vec![name(p.ident()?)];
                while p.is_punct(",") {
                    p.bump();
                    elems.push(name(p.ident()?));
                }
                p.expect_punct("}")?;
                if structure.datastructure.enums.insert(name(&dt), elems).is_some() {
                    return Err(CheckError::Duplicate(name(dt)).into());
                }
            }
            Tok::Ident(w) if w == "fn" => {
                p.bump();
                let sym = p.symbol_decl()?;
                structure.vocabulary.insert(sym).map_err(|e| match e {
                    VocabularyError::Duplicate(n) | VocabularyError::Inconsistent(n) => {
                        CheckError::Duplicate(n)
                    }
                })?;
            }
            Tok::Ident(w) if w == "table" => {
                p.bump();
                tables.push(p.table_decl()?);
            }
            Tok::Ident(w) if w == "init" => {
                p.bump();
                let sym = name(p.ident()?);
                let entries = p.entries()?;
                if inits.iter().any(|(s, _)| *s == sym) {
                    return Err(CheckError::Duplicate(sym).into());
                }
                inits.push((sym, entries));
            }
            _ => break,
        }
    }
    if p.is_word("program") {
        p.bump();
    }
    let program = if *p.peek() == Tok::Eof {
        Rule::skip()
    } else {
        p.rule()?
    };
    if *p.peek() != Tok::Eof {
        return Err(p.error("end of input").into());
    }

    let ds = structure.datastructure.clone();
    for t in tables {
        let part = TablePart {
            domain: t.domain.map(|(arithmetic, enums)| Domain {
                arithmetic,
                enums: enums.into_iter().collect(),
            }),
            entries: resolve_entries(&ds, &t.entries)?,
            fallback: t.fallback.as_ref().map(|f| resolve(&ds, f)).transpose()?,
        };
        structure.tables.entry(t.symbol).or_default().push(part);
    }
    let mut init = IndexMap::new();
    for (sym, entries) in inits {
        init.insert(sym, resolve_entries(&ds, &entries)?);
    }
    let mut unit = Algorithm::new(structure, program);
    unit.init = init;
    Ok((unit, generated))
}

/// Parses and checks a unit. `$`-prefixed names are accepted only under
/// `pragma generated`.
pub fn parse(src: &str) -> Result<Algorithm, SourceError> {
    let (unit, generated) = parse_unchecked(src)?;
    unit.check(generated)?;
    Ok(unit)
}

/// Parses a single rule.
pub fn parse_rule(src: &str) -> Result<Rule, ParseError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
    };
    let r = p.rule()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error("end of input"));
    }
    Ok(r)
}

/// Parses a single term.
pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
    };
    let t = p.term()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error("end of input"));
    }
    Ok(t)
}

/// Parses a value literal: `true`, `false`, `nil`, a numeral, or an enum
/// element name of `ds`.
pub fn parse_value(ds: &Datastructure, src: &str) -> Result<Value, ParseError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
    };
    let raw = p.raw_value()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error("end of input"));
    }
    resolve(ds, &raw)
}
