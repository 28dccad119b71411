//! Fixtures shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use asm_workbench::algorithm::Algorithm;
use asm_workbench::eval::FailureClass;
use asm_workbench::parser::{parse, parse_term};
use asm_workbench::passes::normalize::{Clause, CompoundConditional};
use asm_workbench::state::{Location, State};
use asm_workbench::syntax::{Rule, Term};
use asm_workbench::value::Value;

pub fn corpus(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(file)
}

pub fn load(file: &str) -> Algorithm {
    parse(&std::fs::read_to_string(corpus(file)).unwrap()).unwrap()
}

/// What a hand-written program does, worked out by reading it.
#[derive(Clone, Debug, PartialEq)]
pub enum Expect {
    Output { value: Value, step: usize },
    Fails { class: FailureClass, step: usize },
    Runs,
}

pub struct HandCase {
    pub name: &'static str,
    pub algorithm: Algorithm,
    pub inputs: Vec<Value>,
    pub expect: Expect,
}

/// Hand-written separation cases. Between them they hit both failure
/// scenarios: an undefined static, reached directly and through a
/// separated symbol, and contradictory updates, to an untouched symbol and
/// to a separated one.
pub fn separation_hand_cases() -> Vec<HandCase> {
    let inline = |src: &str| parse(src).unwrap();
    vec![
        HandCase {
            name: "contradiction",
            algorithm: load("contradiction.asm"),
            inputs: vec![Value::Nat(3)],
            // y := 3 and y := 4 in the same step
            expect: Expect::Fails {
                class: FailureClass::Contradiction,
                step: 0,
            },
        },
        HandCase {
            name: "undefined_static",
            algorithm: load("undefined_static.asm"),
            inputs: vec![Value::Nat(0)],
            // y := 1, then half(1) has no entry
            expect: Expect::Fails {
                class: FailureClass::Undefined,
                step: 1,
            },
        },
        HandCase {
            name: "separated_contradiction",
            algorithm: inline(
                "backend arithmetic\nfn f/1 numeric\nfn out/0 out\ninit f { [0] -> 7 }\n\
                 program\nif eq(f(0), 7) then par { f(0) := 1 ; f(0) := 2 } else out := f(0)",
            ),
            inputs: vec![],
            expect: Expect::Fails {
                class: FailureClass::Contradiction,
                step: 0,
            },
        },
        HandCase {
            name: "separated_static_read",
            algorithm: inline(
                "backend arithmetic\nfn f/0 numeric\nfn out/0 out\nfn half/1 static\n\
                 table half { [0] -> 0, [2] -> 1 }\ninit f { [] -> 2 }\n\
                 program\nif eq(f, 2) then par { out := half(f) ; f := 3 } else out := half(f)",
            ),
            inputs: vec![],
            // half(2) = 1 is written on step 0, which already ends the run
            expect: Expect::Output {
                value: Value::Nat(1),
                step: 0,
            },
        },
        HandCase {
            name: "separated_undefined_later",
            algorithm: inline(
                "backend arithmetic\nfn f/0 numeric\nfn out/0 out\nfn half/1 static\n\
                 table half { [0] -> 0, [2] -> 1 }\ninit f { [] -> 2 }\n\
                 program\nif eq(f, 2) then f := 3 else out := half(f)",
            ),
            inputs: vec![],
            // f becomes 3, then half(3) has no entry
            expect: Expect::Fails {
                class: FailureClass::Undefined,
                step: 1,
            },
        },
        HandCase {
            name: "update_then_read",
            algorithm: inline(
                "backend arithmetic\nfn f/1 numeric\nfn g/0\nfn started/0 relational\nfn out/0 out\n\
                 init f { [0] -> 5, [1] -> 6 }\n\
                 program\nif not(started) then par { f(0) := 1 ; started := true }\n\
                 else par { out := f(0) ; g := f(1) }",
            ),
            inputs: vec![],
            // the updated f(0) is read back, f(1) still has its initial value
            expect: Expect::Output {
                value: Value::Nat(1),
                step: 1,
            },
        },
        HandCase {
            name: "watchdog",
            algorithm: load("watchdog.asm"),
            inputs: vec![],
            expect: Expect::Runs,
        },
    ]
}

fn g(name: &str) -> Term {
    parse_term(&format!("sw({name})")).unwrap()
}

/// The merge example: `if g1 then P1 elseif g2 then P2` in parallel with
/// `if h1 then Q1`, as compound conditionals. Each guard is `sw(v)` for a
/// static `sw` and a dynamic switch `v`.
pub fn merge_operands() -> (CompoundConditional, CompoundConditional) {
    let body = |r: &str| vec![asm_workbench::parser::parse_rule(r).unwrap()];
    let p = CompoundConditional {
        clauses: vec![
            Clause {
                guard: g("g1"),
                body: body("p1 := pv(1)"),
            },
            Clause {
                guard: g("g2"),
                body: body("p2 := pv(2)"),
            },
        ],
    };
    let q = CompoundConditional {
        clauses: vec![Clause {
            guard: g("h1"),
            body: body("q1 := pv(3)"),
        }],
    };
    (p, q)
}

/// The five clauses the merge should produce, in order.
pub fn merge_expected() -> Vec<(Term, Vec<&'static str>)> {
    vec![
        (Term::and(g("g1"), g("h1")), vec!["p1", "q1"]),
        (g("g1"), vec!["p1"]),
        (Term::and(g("g2"), g("h1")), vec!["p2", "q1"]),
        (g("g2"), vec!["p2"]),
        (g("h1"), vec!["q1"]),
    ]
}

pub fn merge_algorithm(program: Rule) -> Algorithm {
    let mut a = parse(
        "backend arithmetic\nfn g1/0 numeric\nfn g2/0 numeric\nfn h1/0 numeric\n\
         fn p1/0\nfn p2/0\nfn q1/0\nfn sw/1 static relational\nfn pv/1 static\n\
         table sw { [0] -> false, [1] -> true }\ntable pv { [1] -> 10, [2] -> 20, [3] -> 30 }\n\
         program\nskip",
    )
    .unwrap();
    a.program = program;
    a
}

/// The six guard-truth categories: g1 holds; or g1 fails and g2 holds; or
/// both fail; each with h1 true or false. Returns (label, state).
pub fn merge_categories(a: &Algorithm) -> Vec<(String, State)> {
    let mut out = Vec::new();
    for (gl, g1, g2) in [("g1", 1, 0), ("!g1 g2", 0, 1), ("!g1 !g2", 0, 0)] {
        for h1 in [1, 0] {
            let mut st = State::new(Arc::clone(&a.structure));
            for (n, v) in [("g1", g1), ("g2", g2), ("h1", h1)] {
                st.write(&Location::new(asm_workbench::value::name(n), vec![]), Value::Nat(v));
            }
            let hl = if h1 == 1 { "h1" } else { "!h1" };
            out.push((format!("{gl} {hl}"), st));
        }
    }
    out
}

/// Updates each category should produce, read off the two conditionals.
pub fn merge_expected_updates(label: &str) -> BTreeMap<&'static str, u64> {
    let mut m = BTreeMap::new();
    if label.starts_with("g1") {
        m.insert("p1", 10);
    } else if label.starts_with("!g1 g2") {
        m.insert("p2", 20);
    }
    if label.ends_with(" h1") {
        m.insert("q1", 30);
    }
    m
}
